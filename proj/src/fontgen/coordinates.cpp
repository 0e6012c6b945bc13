#include "adaptifont/fontgen/coordinates.hpp"

#include <charconv>
#include <cstdio>

#include "adaptifont/error.hpp"

namespace adaptifont::fontgen {

FontCoordinates parse_coordinates(std::string_view text) {
  FontCoordinates c;
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = i < 2 ? text.find(',', pos) : text.size();
    if (end == std::string_view::npos) throw Error(ErrorCode::kInvalidArgument, "expected three comma-separated coordinates");
    std::string token(text.substr(pos, end - pos));
    std::size_t used = 0;
    try {
      c[i] = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != token.size()) {
      throw Error(ErrorCode::kInvalidArgument, "bad coordinate '" + token + "'");
    }
    pos = end + 1;
  }
  return c;
}

std::string format_coordinates(const FontCoordinates& c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.3f,%.3f,%.3f", c[0], c[1], c[2]);
  return buf;
}

FontCoordinates FeasibleRegion::sample(Rng& rng, long max_draws) const {
  if (!nonempty()) throw Error(ErrorCode::kInfeasible, "feasible region is empty");
  for (long draw = 0; draw < max_draws; ++draw) {
    FontCoordinates c(uniform(rng, lower, upper), uniform(rng, lower, upper), uniform(rng, lower, upper));
    if (contains(c)) return c;
  }
  throw Error(ErrorCode::kInfeasible, "rejection sampling found no feasible point; region malformed");
}

FontCoordinates interpolate(const FontCoordinates& a, const FontCoordinates& b, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::kOutOfRange, "interpolation parameter outside [0,1]");
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  return FontCoordinates((1.0 - t) * a.value + t * b.value);
}

}  // namespace adaptifont::fontgen
