#include "adaptifont/optimizer/hyperparams.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adaptifont/error.hpp"
#include "adaptifont/rng.hpp"

namespace adaptifont::optimizer {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

LogMarginal log_marginal_likelihood(const std::vector<Observation>& obs, const Standardization& st,
                                    const KernelParams& p) {
  const auto n = static_cast<Eigen::Index>(obs.size());
  if (n == 0) return {};
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = (obs[static_cast<std::size_t>(i)].wpm - st.mean) / st.sd;
  Eigen::MatrixXd Kf(n, n), Dl(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Kf(i, i) = p.signal_variance;
    Dl(i, i) = 0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r = (obs[static_cast<std::size_t>(i)].c.value - obs[static_cast<std::size_t>(j)].c.value).norm();
      Kf(i, j) = Kf(j, i) = matern52(r, p);
      Dl(i, j) = Dl(j, i) = matern52_dlog_length(r, p);
    }
  }
  for (double jitter : kJitterLadder) {
    Eigen::MatrixXd A = Kf;
    A.diagonal().array() += p.noise + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) continue;
    const Eigen::VectorXd alpha = llt.solve(y);
    const Eigen::MatrixXd L = llt.matrixL();
    LogMarginal out;
    out.value = -0.5 * y.dot(alpha) - L.diagonal().array().log().sum() - 0.5 * static_cast<double>(n) * kLog2Pi;
    const Eigen::MatrixXd W = alpha * alpha.transpose() - llt.solve(Eigen::MatrixXd::Identity(n, n));
    out.gradient[0] = 0.5 * (W.array() * Dl.array()).sum();
    out.gradient[1] = 0.5 * (W.array() * Kf.array()).sum();  // dK/dlog(sigma_f^2) = K_f
    return out;
  }
  throw Error(ErrorCode::kNumerical, "log marginal likelihood: covariance not positive definite");
}

BoundedResult minimize_bounded(const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& f,
                               Eigen::VectorXd x, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                               int max_iter, double gtol) {
  const Eigen::Index m = x.size();
  auto project = [&](const Eigen::VectorXd& v) { return v.cwiseMax(lower).cwiseMin(upper).eval(); };
  auto pinned = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& g, Eigen::Index i) {
    return (v[i] <= lower[i] && g[i] > 0) || (v[i] >= upper[i] && g[i] < 0);
  };

  x = project(x);
  Eigen::VectorXd g(m);
  double fx = f(x, g);
  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(m, m);
  BoundedResult res;
  int it = 0;
  for (; it < max_iter; ++it) {
    Eigen::VectorXd pg = g;
    for (Eigen::Index i = 0; i < m; ++i)
      if (pinned(x, g, i)) pg[i] = 0;
    if (pg.lpNorm<Eigen::Infinity>() < gtol) break;

    Eigen::VectorXd d = -(Hinv * pg);
    for (Eigen::Index i = 0; i < m; ++i)
      if (pinned(x, g, i)) d[i] = 0;
    if (g.dot(d) >= 0) {
      Hinv.setIdentity();
      d = -pg;
    }

    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd xn, gn(m);
    double fn = 0;
    for (int ls = 0; ls < 50; ++ls) {
      xn = project(x + t * d);
      fn = f(xn, gn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * g.dot(xn - x)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (!Hinv.isIdentity()) {
        Hinv.setIdentity();
        continue;
      }
      break;
    }
    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd yv = gn - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
      Hinv = (I - rho * s * yv.transpose()) * Hinv * (I - rho * yv * s.transpose()) + rho * s * s.transpose();
    }
    const bool stalled = std::abs(fx - fn) <= 1e-15 * (1.0 + std::abs(fx)) && s.lpNorm<Eigen::Infinity>() < 1e-12;
    x = xn;
    fx = fn;
    g = gn;
    if (stalled) break;
  }
  res.x = x;
  res.value = fx;
  res.gradient = g;
  res.iterations = it;
  return res;
}

KernelParams fit_hyperparams(const std::vector<Observation>& obs, const HyperparamBounds& b, double noise,
                             std::uint64_t seed) {
  if (obs.size() < 2) throw Error(ErrorCode::kInvalidArgument, "hyperparameter fit needs at least two observations");
  KernelParams defaults;
  defaults.noise = noise;
  defaults.length_scale = std::clamp(1.0, b.length_min, b.length_max);
  defaults.signal_variance = std::clamp(1.0, b.variance_min, b.variance_max);

  const auto [lo, hi] = std::minmax_element(obs.begin(), obs.end(),
                                            [](const Observation& a, const Observation& c) { return a.wpm < c.wpm; });
  if (hi->wpm - lo->wpm <= 1e-12 * std::max(1.0, std::abs(hi->wpm))) {
    defaults.signal_variance = b.variance_min;
    return defaults;
  }
  const Standardization st = GpState::standardize(obs);

  const Eigen::Vector2d lower(std::log(b.length_min), std::log(b.variance_min));
  const Eigen::Vector2d upper(std::log(b.length_max), std::log(b.variance_max));
  auto objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
    KernelParams p{std::exp(theta[0]), std::exp(theta[1]), noise};
    try {
      const LogMarginal lml = log_marginal_likelihood(obs, st, p);
      grad = -lml.gradient;
      return -lml.value;
    } catch (const Error&) {
      grad.setZero(2);
      return std::numeric_limits<double>::infinity();
    }
  };

  Rng rng = make_rng({seed, 0x4859504552});
  KernelParams best = defaults;
  double best_value = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, b.restarts); ++r) {
    Eigen::VectorXd start(2);
    if (r == 0) {
      start << std::log(defaults.length_scale), std::log(defaults.signal_variance);
    } else {
      start << uniform(rng, lower[0], upper[0]), uniform(rng, lower[1], upper[1]);
    }
    const BoundedResult res = minimize_bounded(objective, start, lower, upper);
    if (res.value < best_value) {
      best_value = res.value;
      best = KernelParams{std::exp(res.x[0]), std::exp(res.x[1]), noise};
    }
  }
  return best;
}

GpState refit(const GpState& state, const HyperparamBounds& bounds, std::uint64_t seed) {
  const KernelParams p = fit_hyperparams(state.observations(), bounds, state.params().noise, seed);
  GpState s = GpState::from_observations(state.observations(), p, GpState::standardize(state.observations()));
  return s;
}

}  // namespace adaptifont::optimizer
