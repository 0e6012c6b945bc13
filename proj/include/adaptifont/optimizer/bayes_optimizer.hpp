#pragma once

#include <cstdint>

#include "adaptifont/json_io.hpp"
#include "adaptifont/optimizer/acquisition.hpp"

namespace adaptifont::optimizer {

struct OptimizerConfig {
  AcquisitionConfig acquisition;
  FeasibleRegion region;
  HyperparamBounds bounds;
  KernelParams initial_params;  // noise taken from here; 0.001 by default
  int refit_every = 5;
  double iv_radius = 0.225;
  int iv_samples = 2000;
};

Json optimizer_config_to_json(const OptimizerConfig& cfg);
OptimizerConfig optimizer_config_from_json(const Json& doc);

struct RecordOutcome {
  double iv_before = 0;
  double iv_after = 0;  // same hyperparameters, after conditioning on the observation
  bool refit = false;
};

/// Stateful driver: owns the GP state and the proposal counter.
class BayesOptimizer {
 public:
  explicit BayesOptimizer(OptimizerConfig cfg);

  Proposal propose();

  /// Conditions on `obs` and refits hyperparameters every `refit_every`
  /// observations. Reports the integrated variance around obs.c before and
  /// after conditioning with the hyperparameters held fixed.
  RecordOutcome record(const Observation& obs);

  const GpState& state() const { return state_; }
  const OptimizerConfig& config() const { return cfg_; }
  long calls() const { return calls_; }

 private:
  OptimizerConfig cfg_;
  GpState state_;
  long calls_ = 0;
};

Json kernel_params_to_json(const KernelParams& p);

}  // namespace adaptifont::optimizer
