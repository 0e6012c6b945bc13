#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "adaptifont/optimizer/gp.hpp"

namespace adaptifont::optimizer {

struct HyperparamBounds {
  double length_min = 0.05;
  double length_max = 100.0;
  double variance_min = 0.01;
  double variance_max = 100.0;
  int restarts = 5;
};

struct LogMarginal {
  double value = 0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();  // w.r.t. (log l, log sigma_f^2)
};

/// GP log marginal likelihood of standardized targets and its analytic
/// gradient in log-parameter space. Noise is held fixed.
LogMarginal log_marginal_likelihood(const std::vector<Observation>& obs, const Standardization& standardization,
                                    const KernelParams& params);

/// Result of a bounded minimization.
struct BoundedResult {
  Eigen::VectorXd x;
  double value = 0;
  Eigen::VectorXd gradient;
  int iterations = 0;
};

/// Projected BFGS with an Armijo search along the projection arc; the box
/// is handled by freezing variables pinned at a bound with outward gradient.
BoundedResult minimize_bounded(const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& f,
                               Eigen::VectorXd x0, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                               int max_iter = 200, double gtol = 1e-7);

/// Maximizes the log marginal likelihood over (l, sigma_f^2) from
/// `bounds.restarts` seeded starting points, noise fixed. Degenerate targets
/// (all equal) return the clipped defaults with the variance floor.
KernelParams fit_hyperparams(const std::vector<Observation>& obs, const HyperparamBounds& bounds, double noise,
                             std::uint64_t seed);

/// Refits hyperparameters and standardization and returns the new state.
GpState refit(const GpState& state, const HyperparamBounds& bounds, std::uint64_t seed);

}  // namespace adaptifont::optimizer
