#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "adaptifont/fontgen/coordinates.hpp"
#include "adaptifont/optimizer/kernel.hpp"

namespace adaptifont::optimizer {

using fontgen::FontCoordinates;

struct Observation {
  FontCoordinates c;
  double wpm = 0;
};

/// Affine map between raw targets (words per minute) and the GP's
/// zero-mean, unit-variance working scale.
struct Standardization {
  double mean = 0;
  double sd = 1;
  bool operator==(const Standardization&) const = default;
};

struct Posterior {
  double mean = 0;
  double variance = 0;
};

/// Gaussian-process surrogate: observations, hyperparameters, target
/// standardization and the cached Cholesky factor of K + noise*I.
/// A GpState is a value; conditioning returns a new state.
class GpState {
 public:
  GpState() : GpState(KernelParams{}) {}
  explicit GpState(KernelParams params);

  /// Factorizes from scratch with explicit standardization.
  static GpState from_observations(std::vector<Observation> obs, KernelParams params, Standardization standardization);

  /// Appends one observation with hyperparameters and standardization held
  /// fixed (rank-one extension of the factor).
  GpState condition(const Observation& obs) const;

  /// Same observations, new parameters; standardization recomputed from the
  /// data when `restandardize`.
  GpState with_params(KernelParams params, bool restandardize) const;

  Posterior posterior(const FontCoordinates& x) const;
  Posterior posterior(const Eigen::Vector3d& x) const;
  /// Posterior on the standardized working scale.
  Posterior latent(const Eigen::Vector3d& x) const;

  const std::vector<Observation>& observations() const { return obs_; }
  std::size_t size() const { return obs_.size(); }
  const KernelParams& params() const { return params_; }
  const Standardization& standardization() const { return std_; }
  bool fitted() const { return fitted_; }
  void mark_fitted(bool f) { fitted_ = f; }
  /// Extra diagonal jitter needed for the factorization (0 when none).
  double jitter() const { return jitter_; }
  const Eigen::MatrixXd& cholesky() const { return L_; }
  Eigen::VectorXd standardized_targets() const;

  static Standardization standardize(const std::vector<Observation>& obs);

 private:
  void factorize();

  std::vector<Observation> obs_;
  KernelParams params_;
  Standardization std_;
  bool fitted_ = false;
  double jitter_ = 0;
  Eigen::Matrix<double, Eigen::Dynamic, 3> X_;
  Eigen::MatrixXd L_;
  Eigen::VectorXd weights_;  // (K + noise I)^-1 y_standardized
};

/// Jitter ladder used when K + noise*I is not numerically positive definite.
inline constexpr double kJitterLadder[] = {0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6};

}  // namespace adaptifont::optimizer
