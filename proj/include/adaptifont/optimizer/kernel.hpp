#pragma once

#include <Eigen/Core>

namespace adaptifont::optimizer {

/// Matern kernel hyperparameters. The smoothness is fixed at nu = 5/2.
struct KernelParams {
  double length_scale = 1.0;
  double signal_variance = 1.0;
  double noise = 1e-3;  // added to the Gram diagonal, standardized-target units
  static constexpr double nu = 2.5;

  bool valid() const { return length_scale > 0 && signal_variance > 0 && noise > 0; }
  bool operator==(const KernelParams&) const = default;
};

/// sigma_f^2 (1 + sqrt5 r/l + 5 r^2 / (3 l^2)) exp(-sqrt5 r/l)
double matern52(double r, const KernelParams& p);
double matern52(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const KernelParams& p);

/// d k / d log(length_scale) at distance r.
double matern52_dlog_length(double r, const KernelParams& p);

}  // namespace adaptifont::optimizer
