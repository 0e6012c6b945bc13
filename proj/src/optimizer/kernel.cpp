#include "adaptifont/optimizer/kernel.hpp"

#include <cmath>

namespace adaptifont::optimizer {

namespace {
constexpr double kSqrt5 = 2.2360679774997896964091736687313;
}

double matern52(double r, const KernelParams& p) {
  const double a = kSqrt5 * r / p.length_scale;
  return p.signal_variance * (1.0 + a + a * a / 3.0) * std::exp(-a);
}

double matern52(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const KernelParams& p) {
  return matern52((a - b).norm(), p);
}

double matern52_dlog_length(double r, const KernelParams& p) {
  const double a = kSqrt5 * r / p.length_scale;
  return p.signal_variance * std::exp(-a) * a * a * (1.0 + a) / 3.0;
}

}  // namespace adaptifont::optimizer
