#include "adaptifont/optimizer/gp.hpp"

#include <cmath>
#include <iostream>

#include "adaptifont/error.hpp"

namespace adaptifont::optimizer {

GpState::GpState(KernelParams params) : params_(params) {
  if (!params_.valid()) throw Error(ErrorCode::kInvalidArgument, "kernel parameters must be positive");
}

Standardization GpState::standardize(const std::vector<Observation>& obs) {
  Standardization s;
  if (obs.empty()) return s;
  double m = 0;
  for (const auto& o : obs) m += o.wpm;
  m /= static_cast<double>(obs.size());
  double ss = 0;
  for (const auto& o : obs) ss += (o.wpm - m) * (o.wpm - m);
  const double sd = std::sqrt(ss / static_cast<double>(obs.size()));
  s.mean = m;
  s.sd = sd > 1e-12 * std::max(1.0, std::abs(m)) ? sd : 1.0;
  return s;
}

GpState GpState::from_observations(std::vector<Observation> obs, KernelParams params, Standardization standardization) {
  if (!(standardization.sd > 0)) throw Error(ErrorCode::kInvalidArgument, "standardization sd must be positive");
  GpState s(params);
  s.obs_ = std::move(obs);
  s.std_ = standardization;
  s.fitted_ = true;
  s.factorize();
  return s;
}

GpState GpState::with_params(KernelParams params, bool restandardize) const {
  GpState s(params);
  s.obs_ = obs_;
  s.std_ = restandardize ? standardize(obs_) : std_;
  s.fitted_ = fitted_;
  s.factorize();
  return s;
}

Eigen::VectorXd GpState::standardized_targets() const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(obs_.size()));
  for (std::size_t i = 0; i < obs_.size(); ++i) y[static_cast<Eigen::Index>(i)] = (obs_[i].wpm - std_.mean) / std_.sd;
  return y;
}

void GpState::factorize() {
  const auto n = static_cast<Eigen::Index>(obs_.size());
  X_.resize(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) X_.row(i) = obs_[static_cast<std::size_t>(i)].c.value.transpose();
  if (n == 0) {
    L_.resize(0, 0);
    weights_.resize(0);
    jitter_ = 0;
    return;
  }
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = params_.signal_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      K(i, j) = K(j, i) = matern52((X_.row(i) - X_.row(j)).norm(), params_);
    }
  }
  for (double jitter : kJitterLadder) {
    Eigen::MatrixXd A = K;
    A.diagonal().array() += params_.noise + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) {
      if (jitter > 0) std::clog << "adaptifont: GP factorization needed jitter " << jitter << "\n";
      jitter_ = jitter;
      L_ = llt.matrixL();
      weights_ = llt.solve(standardized_targets());
      return;
    }
  }
  throw Error(ErrorCode::kNumerical, "GP covariance not positive definite even with 1e-6 jitter");
}

GpState GpState::condition(const Observation& obs) const {
  if (!(obs.wpm >= 0) || !std::isfinite(obs.wpm)) throw Error(ErrorCode::kInvalidArgument, "wpm must be finite and >= 0");
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(obs.c[i])) throw Error(ErrorCode::kInvalidArgument, "coordinates must be finite");
  }
  GpState s = *this;
  s.obs_.push_back(obs);
  if (!fitted_) {
    // no hyperparameter fit yet: center on the data, keep unit scale
    s.std_ = Standardization{standardize(s.obs_).mean, 1.0};
  }
  const auto n = static_cast<Eigen::Index>(obs_.size());
  if (n == 0) {
    s.factorize();
    return s;
  }
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) k[i] = matern52((X_.row(i).transpose() - obs.c.value).norm(), params_);
  const Eigen::VectorXd l = L_.triangularView<Eigen::Lower>().solve(k);
  const double d2 = params_.signal_variance + params_.noise + jitter_ - l.squaredNorm();
  if (!(d2 > 1e-14 * (params_.signal_variance + params_.noise))) {
    s.factorize();
    return s;
  }
  s.X_.conservativeResize(n + 1, 3);
  s.X_.row(n) = obs.c.value.transpose();
  s.L_.conservativeResize(n + 1, n + 1);
  s.L_.col(n).setZero();
  s.L_.block(n, 0, 1, n) = l.transpose();
  s.L_(n, n) = std::sqrt(d2);
  const Eigen::VectorXd y = s.standardized_targets();
  s.weights_ = s.L_.triangularView<Eigen::Lower>().transpose().solve(s.L_.triangularView<Eigen::Lower>().solve(y));
  return s;
}

Posterior GpState::posterior(const FontCoordinates& x) const { return posterior(x.value); }

Posterior GpState::latent(const Eigen::Vector3d& x) const {
  Posterior p;
  const auto n = X_.rows();
  if (n == 0) {
    p.variance = params_.signal_variance;
    return p;
  }
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) k[i] = matern52((X_.row(i).transpose() - x).norm(), params_);
  p.mean = k.dot(weights_);
  const Eigen::VectorXd v = L_.triangularView<Eigen::Lower>().solve(k);
  p.variance = std::max(0.0, params_.signal_variance - v.squaredNorm());
  return p;
}

Posterior GpState::posterior(const Eigen::Vector3d& x) const {
  const Posterior z = latent(x);
  return {std_.mean + std_.sd * z.mean, z.variance * std_.sd * std_.sd};
}

}  // namespace adaptifont::optimizer
