#include <doctest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "adaptifont/json_io.hpp"
#include "adaptifont/service/api.hpp"
#include "adaptifont/session/corpus.hpp"
#include "adaptifont/session/replay.hpp"
#include "adaptifont/session/simulate.hpp"
#include "adaptifont/utf8.hpp"
#include "fixtures.hpp"

#include <httplib.h>  // after Eigen: glibc defines _res

using namespace adaptifont;
using namespace adaptifont::service;

namespace {

Json base_config(int n_trials = 12) {
  return {{"texts", session::corpus_to_json(session::demo_corpus(95, 1))}, {"n_trials", n_trials}};
}

struct Client {
  session::VirtualClock clock;
  std::unique_ptr<Api> api;

  explicit Client(const std::filesystem::path& dir = {}, std::shared_ptr<const fontspace::FontBasis> basis = nullptr,
                  int n_trials = 12) {
    api = std::make_unique<Api>(make_config(dir, std::move(basis), n_trials));
  }
  ServiceConfig make_config(const std::filesystem::path& dir, std::shared_ptr<const fontspace::FontBasis> basis,
                            int n_trials) {
    ServiceConfig c;
    c.data_dir = dir;
    c.default_config = base_config(n_trials);
    c.basis = std::move(basis);
    c.seed = 99;
    c.clock = clock.clock();
    return c;
  }
  Response call(const std::string& method, const std::string& path, const Json& body = nullptr,
                const std::string& key = {}) {
    return api->handle(method, path, body.is_null() ? "" : body.dump(), key);
  }
  std::string create(const Json& body = Json::object()) {
    const Response r = call("POST", "/api/session", body);
    REQUIRE(r.status == 201);
    return Json::parse(r.body)["session_id"];
  }
  // Runs the active trial to a result; returns the result response.
  Response read_trial(const std::string& sid, double duration_ms = 20000) {
    const Json t = Json::parse(call("GET", "/api/session/" + sid + "/trial").body);
    clock.advance(2000);
    const Response text = call("GET", "/api/session/" + sid + "/trial/text");
    REQUIRE(text.status == 200);
    Json body = {{"duration_ms", duration_ms}, {"press_count", 1}};
    if (!t["mc"].is_null()) body["mc_answer"] = 0;
    return call("POST", "/api/session/" + sid + "/trial/" + std::to_string(t["trial_id"].get<long>()) + "/result", body);
  }
};

std::string error_code(const Response& r) { return Json::parse(r.body)["error"]["code"]; }

std::map<std::string, int> event_counts(const std::filesystem::path& log) {
  std::map<std::string, int> n;
  for (const auto& e : read_json_lines(log)) ++n[e["event"].get<std::string>()];
  return n;
}

}  // namespace

TEST_CASE("status mapping and error envelope") {
  CHECK(http_status(ErrorCode::kNotFound) == 404);
  CHECK(http_status(ErrorCode::kGateClosed) == 425);
  CHECK(http_status(ErrorCode::kConflict) == 409);
  CHECK(http_status(ErrorCode::kInvalidArgument) == 400);
  const Json e = Json::parse(error_response(ErrorCode::kConflict, "nope").body);
  CHECK(e["error"]["code"] == "conflict");
  CHECK(e["error"]["message"] == "nope");
}

TEST_CASE("happy path through the handler") {
  Client c;
  const std::string sid = c.create();
  const std::string base = "/api/session/" + sid;
  const Response tr = c.call("GET", base + "/trial");
  REQUIRE(tr.status == 200);
  const Json t = Json::parse(tr.body);
  for (const char* k : {"trial_id", "category", "gate_delay_ms", "text", "font", "coords", "phase"}) CHECK(t.contains(k));
  CHECK(t["text"].is_null());
  CHECK(t["phase"] == "init");
  CHECK(Json::parse(c.call("GET", base + "/trial").body)["trial_id"] == t["trial_id"]);

  const Response early = c.call("GET", base + "/trial/text");
  CHECK(early.status == 425);
  CHECK(error_code(early) == "gate_closed");
  c.clock.advance(2000);
  const Response text = c.call("GET", base + "/trial/text");
  REQUIRE(text.status == 200);
  const Json tx = Json::parse(text.body);
  CHECK(tx["word_count"].get<int>() > 0);

  const std::string result = base + "/trial/" + std::to_string(t["trial_id"].get<long>()) + "/result";
  CHECK(c.call("POST", result, Json{{"press_count", 1}}).status == 400);
  CHECK(c.api->handle("POST", result, "{not json").status == 400);
  Json body = {{"duration_ms", 30000}, {"press_count", 2}};
  if (!t["mc"].is_null()) body["mc_answer"] = 1;
  const Response ok = c.call("POST", result, body);
  REQUIRE(ok.status == 200);
  const Json r = Json::parse(ok.body);
  CHECK(r["wpm"].get<double>() == doctest::Approx(tx["word_count"].get<double>() * 2));
  for (const char* k : {"wpm", "score", "feedback"}) CHECK(r.contains(k));
  CHECK(r["feedback"].contains("detection_accuracy"));

  while (!Json::parse(c.read_trial(sid).body)["complete"].get<bool>()) {
  }
  CHECK(c.call("GET", base + "/trial").status == 409);
  const Response an = c.call("GET", base + "/analysis");
  REQUIRE(an.status == 200);
  CHECK(Json::parse(an.body).contains("clusters"));
}

TEST_CASE("not found and bad requests") {
  Client c;
  const std::string sid = c.create();
  const std::string base = "/api/session/" + sid;
  c.call("GET", base + "/trial");
  const Response r = c.call("POST", base + "/trial/999/result", Json{{"duration_ms", 1000}});
  CHECK(r.status == 404);
  CHECK(error_code(r) == "not_found");
  CHECK(c.call("GET", "/api/session/nope/trial").status == 404);
  CHECK(c.call("GET", "/api/elsewhere").status == 404);
  CHECK(c.call("GET", base + "/font/1.svg").status == 404);  // no basis
  CHECK(c.call("POST", "/api/session", Json{{"config", {{"n_trials", 500}}}}).status == 400);
  CHECK(c.call("POST", "/api/session", Json{{"config_ref", "missing"}}).status == 404);
  CHECK(c.call("POST", "/api/session", Json{{"config_ref", "../x"}}).status == 400);
  CHECK(c.call("GET", "/api/session").status == 400);
}

TEST_CASE("config_ref and inline config") {
  const auto dir = testing::scratch_dir("service_configs");
  std::filesystem::create_directories(dir / "configs");
  write_json_file(dir / "configs" / "short.json", Json{{"n_trials", 3}, {"gate_delay_ms", 500}});
  Client c(dir);
  const Json made = Json::parse(c.call("POST", "/api/session", Json{{"config_ref", "short"}}).body);
  CHECK(made["n_trials"] == 3);
  CHECK(made["gate_delay_ms"] == 500);
  const Json inline_made =
      Json::parse(c.call("POST", "/api/session", Json{{"config", {{"n_trials", 4}, {"seed", 5}}}}).body);
  CHECK(inline_made["n_trials"] == 4);
  CHECK(c.api->session_count() == 2);
}

TEST_CASE("idempotency keys replay the original response") {
  const auto dir = testing::scratch_dir("service_idem");
  Client c(dir);
  const std::string sid = c.create();
  const std::string base = "/api/session/" + sid;
  const Json t = Json::parse(c.call("GET", base + "/trial").body);
  c.clock.advance(2000);
  c.call("GET", base + "/trial/text");
  Json body = {{"duration_ms", 25000}, {"press_count", 0}};
  if (!t["mc"].is_null()) body["mc_answer"] = 2;
  const std::string url = base + "/trial/" + std::to_string(t["trial_id"].get<long>()) + "/result";
  const Response first = c.call("POST", url, body, "k1");
  const Response again = c.call("POST", url, body, "k1");
  CHECK(first.status == 200);
  CHECK(again.status == first.status);
  CHECK(again.body == first.body);
  CHECK(c.call("POST", url, body, "k2").status == 409);
  CHECK(event_counts(dir / "sessions" / (sid + ".jsonl"))["result"] == 1);

  const Json t2 = Json::parse(c.call("GET", base + "/trial").body);
  const std::string reset = base + "/trial/" + std::to_string(t2["trial_id"].get<long>()) + "/reset";
  const Response r1 = c.call("POST", reset, nullptr, "r");
  const Response r2 = c.call("POST", reset, nullptr, "r");
  CHECK(r1.status == 200);
  CHECK(r2.body == r1.body);
  CHECK(event_counts(dir / "sessions" / (sid + ".jsonl"))["reset"] == 1);
}

TEST_CASE("concurrent duplicate submissions: exactly one accepted") {
  const auto dir = testing::scratch_dir("service_race");
  Client c(dir, nullptr, 30);
  const std::string sid = c.create();
  const std::string base = "/api/session/" + sid;
  for (int round = 0; round < 20; ++round) {
    const Json t = Json::parse(c.call("GET", base + "/trial").body);
    c.clock.advance(2000);
    c.call("GET", base + "/trial/text");
    Json body = {{"duration_ms", 20000 + round}, {"press_count", 1}};
    if (!t["mc"].is_null()) body["mc_answer"] = 0;
    const std::string url = base + "/trial/" + std::to_string(t["trial_id"].get<long>()) + "/result";
    const std::string key = round % 2 ? "same-" + std::to_string(round) : "";
    Response a, b;
    std::thread ta([&] { a = c.call("POST", url, body, key); });
    std::thread tb([&] { b = c.call("POST", url, body, key); });
    ta.join();
    tb.join();
    if (key.empty()) {
      CHECK(((a.status == 200) + (b.status == 200)) == 1);
      CHECK(((a.status == 409) + (b.status == 409)) == 1);
    } else {
      CHECK(a.status == 200);
      CHECK(b.body == a.body);
    }
  }
  CHECK(event_counts(dir / "sessions" / (sid + ".jsonl"))["result"] == 20);
}

TEST_CASE("every acknowledged state change is already in the log") {
  const auto dir = testing::scratch_dir("service_audit");
  Client c(dir);
  const std::string sid = c.create();
  const auto log = dir / "sessions" / (sid + ".jsonl");
  const std::string base = "/api/session/" + sid;
  CHECK(event_counts(log)["start"] == 1);
  std::set<long> issued;
  int results = 0, resets = 0, releases = 0;
  for (int step = 0; step < 14; ++step) {
    const Json t = Json::parse(c.call("GET", base + "/trial").body);
    if (t.contains("error")) break;
    issued.insert(t["trial_id"].get<long>());
    CHECK(event_counts(log)["propose"] == static_cast<int>(issued.size()));
    const std::string tid = std::to_string(t["trial_id"].get<long>());
    if (step % 4 == 1) {
      const Json next = Json::parse(c.call("POST", base + "/trial/" + tid + "/reset").body);
      issued.insert(next["trial_id"].get<long>());
      ++resets;
      auto n = event_counts(log);
      CHECK(n["reset"] == resets);
      CHECK(n["propose"] == static_cast<int>(issued.size()));
      continue;
    }
    c.clock.advance(2000);
    REQUIRE(c.call("GET", base + "/trial/text").status == 200);
    ++releases;
    CHECK(event_counts(log)["reading"] == releases);
    Json body = {{"duration_ms", 15000 + 1000 * step}, {"press_count", 1}};
    if (!t["mc"].is_null()) body["mc_answer"] = 3;
    REQUIRE(c.call("POST", base + "/trial/" + tid + "/result", body).status == 200);
    ++results;
    CHECK(event_counts(log)["result"] == results);
  }
  const auto report = session::replay_log(read_json_lines(log));
  CHECK(report.ok());
  CHECK(report.observations == results + resets);
  CHECK(std::filesystem::exists(dir / "sessions" / (sid + ".snapshot.json")));
}

TEST_CASE("sessions survive a restart") {
  const auto dir = testing::scratch_dir("service_restart");
  std::string sid;
  long active = 0;
  double now = 0;
  {
    Client c(dir);
    sid = c.create();
    for (int i = 0; i < 5; ++i) REQUIRE(c.read_trial(sid).status == 200);
    active = Json::parse(c.call("GET", "/api/session/" + sid + "/trial").body)["trial_id"];
    now = c.clock.now();
  }
  Client c(dir);
  c.clock.advance(now);
  CHECK(c.api->recover_sessions() == 1);
  const Json t = Json::parse(c.call("GET", "/api/session/" + sid + "/trial").body);
  CHECK(t["trial_id"] == active);
  while (true) {
    const Response r = c.read_trial(sid);
    REQUIRE(r.status == 200);
    if (Json::parse(r.body)["complete"].get<bool>()) break;
  }
  const auto events = read_json_lines(dir / "sessions" / (sid + ".jsonl"));
  CHECK(session::replay_log(events).ok());
  CHECK(event_counts(dir / "sessions" / (sid + ".jsonl"))["result"] == 12);
  Client again(dir);
  CHECK(again.api->recover_sessions() == 1);
  CHECK(again.call("GET", "/api/session/" + sid + "/trial").status == 409);
}

TEST_CASE("font payloads and svg download") {
  Client c({}, testing::small_basis(), 3);
  const std::string sid = c.create();
  const std::string base = "/api/session/" + sid;
  const Json t = Json::parse(c.call("GET", base + "/trial").body);
  REQUIRE(t["font"].is_object());
  std::set<std::string> chars;
  for (const auto& g : t["font"]["glyphs"]) {
    chars.insert(g["char"].get<std::string>());
    CHECK(g.contains("path_data"));
    CHECK(g["advance"].get<double>() > 0);
  }
  c.clock.advance(2000);
  const Json tx = Json::parse(c.call("GET", base + "/trial/text").body);
  for (char32_t ch : decode_utf8(tx["text"].get<std::string>())) {
    if (ch == U' ') continue;
    CHECK(chars.count(encode_utf8(ch)) == 1);
  }
  const Response svg = c.call("GET", base + "/font/" + std::to_string(t["trial_id"].get<long>()) + ".svg");
  REQUIRE(svg.status == 200);
  CHECK(svg.content_type == "image/svg+xml");
  std::istringstream in(svg.body);
  boost::property_tree::ptree tree;
  boost::property_tree::read_xml(in, tree);
  int glyphs = 0;
  for (const auto& [name, node] : tree.get_child("svg.defs.font")) glyphs += name == "glyph";
  CHECK(glyphs == static_cast<int>(t["font"]["glyphs"].size()));
  CHECK(c.call("GET", base + "/font/7.svg").status == 404);
}

TEST_CASE("http binding on an ephemeral port") {
  Client c;
  httplib::Server server;
  c.api->bind(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client http("127.0.0.1", port);
  auto created = http.Post("/api/session", "{}", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const std::string sid = Json::parse(created->body)["session_id"];
  auto trial = http.Get("/api/session/" + sid + "/trial");
  REQUIRE(trial);
  CHECK(trial->status == 200);
  const Json t = Json::parse(trial->body);
  CHECK(http.Get("/api/session/" + sid + "/trial/text")->status == 425);
  c.clock.advance(2000);
  CHECK(http.Get("/api/session/" + sid + "/trial/text")->status == 200);
  Json body = {{"duration_ms", 20000}, {"press_count", 1}};
  if (!t["mc"].is_null()) body["mc_answer"] = 0;
  const std::string url = "/api/session/" + sid + "/trial/" + std::to_string(t["trial_id"].get<long>()) + "/result";
  httplib::Headers h = {{"Idempotency-Key", "abc"}};
  auto r1 = http.Post(url, h, body.dump(), "application/json");
  auto r2 = http.Post(url, h, body.dump(), "application/json");
  REQUIRE(r1);
  REQUIRE(r2);
  CHECK(r1->status == 200);
  CHECK(r2->body == r1->body);
  CHECK(http.Post("/api/session/" + sid + "/trial/99/result", body.dump(), "application/json")->status == 404);
  server.stop();
  th.join();
}
