#include "adaptifont/optimizer/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adaptifont/error.hpp"

namespace adaptifont::optimizer {

namespace {
constexpr std::uint64_t kProposeStream = 0x50524f50;
constexpr double kPi = 3.14159265358979323846;
}  // namespace

const char* to_string(Phase p) { return p == Phase::kInit ? "init" : "bo"; }

double ucb(const GpState& state, const FontCoordinates& x, double kappa) {
  const Posterior p = state.posterior(x);
  return p.mean + kappa * std::sqrt(p.variance);
}

namespace {

// UCB on the standardized scale: a positive affine image of ucb(), so it has
// the same maximizer and is exactly invariant to shifts of the targets.
double latent_ucb(const GpState& state, const FontCoordinates& x, double kappa) {
  const Posterior p = state.latent(x.value);
  return p.mean + kappa * std::sqrt(p.variance);
}

}  // namespace

Proposal propose(const GpState& state, const FeasibleRegion& region, const AcquisitionConfig& cfg, long call) {
  if (!region.nonempty()) throw Error(ErrorCode::kInfeasible, "feasible region is empty");
  if (cfg.kappa < 0 || cfg.n_init_random < 0) throw Error(ErrorCode::kInvalidArgument, "invalid acquisition config");
  Rng rng = make_rng({cfg.seed, kProposeStream, static_cast<std::uint64_t>(call)});
  Proposal out;
  out.call = call;
  if (call < cfg.n_init_random || state.size() == 0) {
    out.c = region.sample(rng);
    out.phase = Phase::kInit;
    return out;
  }
  out.phase = Phase::kBo;

  FontCoordinates best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < std::max(1, cfg.n_candidates); ++i) {
    const FontCoordinates c = region.sample(rng);
    const double v = latent_ucb(state, c, cfg.kappa);
    if (v > best_value) {
      best_value = v;
      best = c;
    }
  }

  // projected coordinate ascent; moves leaving the band are rejected
  double step = cfg.ascent_step;
  for (int s = 0; s < cfg.ascent_steps; ++s) {
    bool improved = false;
    for (int d = 0; d < 3; ++d) {
      for (double sign : {1.0, -1.0}) {
        FontCoordinates trial = best;
        trial[d] = std::clamp(best[d] + sign * step, region.lower, region.upper);
        if (trial[d] == best[d] || !region.contains(trial)) continue;
        const double v = latent_ucb(state, trial, cfg.kappa);
        if (v > best_value) {
          best_value = v;
          best = trial;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  out.c = best;
  return out;
}

IntegratedVariance integrated_variance(const GpState& state, const FontCoordinates& center, double r, int n_mc,
                                       std::uint64_t seed) {
  if (!(r > 0)) throw Error(ErrorCode::kInvalidArgument, "radius must be positive");
  if (n_mc < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two Monte-Carlo samples");
  Rng rng = make_rng({seed, 0x4956});
  const double volume = 4.0 / 3.0 * kPi * r * r * r;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n_mc; ++i) {
    Eigen::Vector3d dir(standard_normal(rng), standard_normal(rng), standard_normal(rng));
    double norm = dir.norm();
    while (norm == 0) {
      dir = Eigen::Vector3d(standard_normal(rng), standard_normal(rng), standard_normal(rng));
      norm = dir.norm();
    }
    const double radius = r * std::cbrt(uniform(rng, 0.0, 1.0));
    const double v = state.posterior(Eigen::Vector3d(center.value + dir / norm * radius)).variance;
    sum += v;
    sum2 += v * v;
  }
  const double n = n_mc;
  const double mean = sum / n;
  const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1));
  return {volume * mean, volume * std::sqrt(var / n)};
}

}  // namespace adaptifont::optimizer
