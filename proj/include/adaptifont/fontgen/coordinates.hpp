#pragma once

#include <string>
#include <string_view>

#include <Eigen/Core>

#include "adaptifont/rng.hpp"

namespace adaptifont::fontgen {

/// A point in the 3-d generative font space.
struct FontCoordinates {
  Eigen::Vector3d value = Eigen::Vector3d::Zero();

  FontCoordinates() = default;
  FontCoordinates(double a, double b, double c) : value(a, b, c) {}
  explicit FontCoordinates(const Eigen::Vector3d& v) : value(v) {}

  double operator[](int i) const { return value[i]; }
  double& operator[](int i) { return value[i]; }
  double sum() const { return value.sum(); }
  bool operator==(const FontCoordinates& o) const { return value == o.value; }
};

/// Parses "a,b,c".
FontCoordinates parse_coordinates(std::string_view text);
std::string format_coordinates(const FontCoordinates& c);

/// Box [lower, upper]^3 intersected with the band lower_sum <= sum <= upper_sum.
struct FeasibleRegion {
  double lower = 0.0;
  double upper = 13.0;
  double lower_sum = 7.0;
  double upper_sum = 20.0;

  bool contains(const FontCoordinates& c) const {
    for (int i = 0; i < 3; ++i) {
      if (!(c[i] >= lower && c[i] <= upper)) return false;
    }
    const double s = c.sum();
    return s >= lower_sum && s <= upper_sum;
  }

  bool nonempty() const {
    return lower <= upper && lower_sum <= upper_sum && 3 * lower <= upper_sum && 3 * upper >= lower_sum;
  }

  /// Uniform sample by rejection inside the box; throws after `max_draws`.
  FontCoordinates sample(Rng& rng, long max_draws = 1'000'000) const;
};

/// (1-t)*a + t*b, t in [0,1].
FontCoordinates interpolate(const FontCoordinates& a, const FontCoordinates& b, double t);

}  // namespace adaptifont::fontgen
