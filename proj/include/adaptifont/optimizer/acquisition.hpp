#pragma once

#include <cstdint>

#include "adaptifont/fontgen/coordinates.hpp"
#include "adaptifont/optimizer/gp.hpp"
#include "adaptifont/optimizer/hyperparams.hpp"
#include "adaptifont/rng.hpp"

namespace adaptifont::optimizer {

using fontgen::FeasibleRegion;

struct AcquisitionConfig {
  double kappa = 5.0;
  int n_init_random = 10;
  int n_candidates = 2048;
  int ascent_steps = 50;
  double ascent_step = 0.5;
  std::uint64_t seed = 0;
};

/// mu(x) + kappa * sigma(x), raw target units.
double ucb(const GpState& state, const FontCoordinates& x, double kappa);

enum class Phase { kInit, kBo };
const char* to_string(Phase p);

struct Proposal {
  FontCoordinates c;
  Phase phase = Phase::kInit;
  long call = 0;
};

/// Proposal number `call` (0-based). The first n_init_random calls draw a
/// uniform feasible point; later calls maximize UCB over seeded feasible
/// candidates refined by projected coordinate ascent. The random stream is a
/// function of (seed, call) alone, so a session can be replayed.
Proposal propose(const GpState& state, const FeasibleRegion& region, const AcquisitionConfig& cfg, long call);

struct IntegratedVariance {
  double value = 0;           // ball volume * mean posterior variance
  double standard_error = 0;  // Monte-Carlo standard error of `value`
};

/// Monte-Carlo integral of the posterior variance over the ball of radius r.
IntegratedVariance integrated_variance(const GpState& state, const FontCoordinates& center, double r, int n_mc,
                                       std::uint64_t seed);

}  // namespace adaptifont::optimizer
