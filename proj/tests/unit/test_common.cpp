#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "adaptifont/error.hpp"
#include "adaptifont/json_io.hpp"
#include "adaptifont/rng.hpp"
#include "adaptifont/utf8.hpp"

using namespace adaptifont;

TEST_CASE("utf8 round trip over mixed scripts") {
  const std::u32string cps = {U'A', U'é', U'€', U'\U0001F600', U'z'};
  const std::string bytes = encode_utf8(cps);
  CHECK(bytes.size() == 1 + 2 + 3 + 4 + 1);
  CHECK(decode_utf8(bytes) == cps);
  CHECK(single_code_point("\xc3\xa9") == U'é');
}

TEST_CASE("utf8 rejects malformed input") {
  for (const char* bad : {"\xff", "\xc3", "\xe2\x82", "\xc0\xaf", "\xed\xa0\x80", "\xc3\x28"}) {
    CAPTURE(std::string(bad));
    try {
      decode_utf8(bad);
      FAIL("accepted malformed input");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kMalformedInput);
    }
  }
  CHECK_THROWS_AS(single_code_point("ab"), Error);
  CHECK_THROWS_AS(single_code_point(""), Error);
}

TEST_CASE("seeded streams are addressable and stable") {
  Rng a = make_rng({7, 1, 2});
  Rng b = make_rng({7, 1, 2});
  Rng c = make_rng({7, 2, 1});
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  CHECK(make_rng({7, 1, 2})() != c());
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(derive_seed({42, i}));
  CHECK(seeds.size() == 1000);
}

TEST_CASE("uniform draws stay in range and are roughly uniform") {
  Rng rng = make_rng({3});
  double sum = 0;
  for (int i = 0; i < 20000; ++i) {
    const double u = uniform(rng, 2.0, 5.0);
    REQUIRE(u >= 2.0);
    REQUIRE(u < 5.0);
    sum += u;
  }
  CHECK(sum / 20000 == doctest::Approx(3.5).epsilon(0.01));
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[uniform_index(rng, 7)];
  for (int n : counts) CHECK(std::abs(n - 10000) < 500);
}

TEST_CASE("standard normal has unit moments") {
  Rng rng = make_rng({11});
  double s = 0, s2 = 0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(rng);
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.02);
  CHECK(std::abs(s2 / n - 1) < 0.03);
}

TEST_CASE("doubles survive a JSON round trip bit for bit") {
  Rng rng = make_rng({5});
  for (int i = 0; i < 1000; ++i) {
    const double x = uniform(rng, -1e6, 1e6) * std::pow(10.0, uniform(rng, -20, 20));
    const Json j = Json::parse(Json(x).dump());
    CHECK(j.get<double>() == x);
  }
}

TEST_CASE("json files and lines") {
  const auto dir = std::filesystem::temp_directory_path() / "adaptifont_common_test";
  std::filesystem::create_directories(dir);
  write_json_file(dir / "a.json", Json{{"k", 1.5}});
  CHECK(read_json_file(dir / "a.json")["k"] == 1.5);
  write_text_file(dir / "b.jsonl", "{\"a\":1}\n\n{\"a\":2}\n");
  const auto lines = read_json_lines(dir / "b.jsonl");
  REQUIRE(lines.size() == 2);
  CHECK(lines[1]["a"] == 2);
  write_text_file(dir / "c.jsonl", "{\"a\":1}\n{oops\n");
  CHECK_THROWS_AS(read_json_lines(dir / "c.jsonl"), Error);
  CHECK_THROWS_AS(read_json_file(dir / "missing.json"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("error codes have stable names") {
  CHECK(to_string(ErrorCode::kInfeasible) == "infeasible");
  CHECK(to_string(ErrorCode::kGateClosed) == "gate_closed");
  CHECK(to_string(ErrorCode::kReplayMismatch) == "replay_mismatch");
}
