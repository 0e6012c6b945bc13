#include "adaptifont/optimizer/bayes_optimizer.hpp"

#include "adaptifont/error.hpp"

namespace adaptifont::optimizer {

namespace {
constexpr std::uint64_t kIvStream = 0x4956535452;
constexpr std::uint64_t kFitStream = 0x464954;
}  // namespace

BayesOptimizer::BayesOptimizer(OptimizerConfig cfg) : cfg_(std::move(cfg)), state_(cfg_.initial_params) {
  if (cfg_.refit_every < 1) throw Error(ErrorCode::kInvalidArgument, "refit_every must be >= 1");
  if (!cfg_.region.nonempty()) throw Error(ErrorCode::kInfeasible, "feasible region is empty");
}

Proposal BayesOptimizer::propose() { return optimizer::propose(state_, cfg_.region, cfg_.acquisition, calls_++); }

RecordOutcome BayesOptimizer::record(const Observation& obs) {
  RecordOutcome out;
  const auto n_before = static_cast<std::uint64_t>(state_.size());
  const std::uint64_t iv_seed = derive_seed({cfg_.acquisition.seed, kIvStream, n_before});
  out.iv_before = integrated_variance(state_, obs.c, cfg_.iv_radius, cfg_.iv_samples, iv_seed).value;
  GpState conditioned = state_.condition(obs);
  out.iv_after = integrated_variance(conditioned, obs.c, cfg_.iv_radius, cfg_.iv_samples, iv_seed).value;

  const std::size_t n = conditioned.size();
  if (n >= 2 && (n % static_cast<std::size_t>(cfg_.refit_every) == 0 || !conditioned.fitted())) {
    state_ = refit(conditioned, cfg_.bounds, derive_seed({cfg_.acquisition.seed, kFitStream, n}));
    out.refit = true;
  } else {
    state_ = std::move(conditioned);
  }
  return out;
}

Json kernel_params_to_json(const KernelParams& p) {
  return {{"length_scale", p.length_scale}, {"signal_variance", p.signal_variance}, {"noise", p.noise}, {"nu", KernelParams::nu}};
}

Json optimizer_config_to_json(const OptimizerConfig& c) {
  return {{"acquisition",
           {{"kappa", c.acquisition.kappa},
            {"n_init_random", c.acquisition.n_init_random},
            {"n_candidates", c.acquisition.n_candidates},
            {"ascent_steps", c.acquisition.ascent_steps},
            {"ascent_step", c.acquisition.ascent_step},
            {"seed", c.acquisition.seed}}},
          {"region",
           {{"lower", c.region.lower}, {"upper", c.region.upper}, {"lower_sum", c.region.lower_sum},
            {"upper_sum", c.region.upper_sum}}},
          {"bounds",
           {{"length_min", c.bounds.length_min}, {"length_max", c.bounds.length_max},
            {"variance_min", c.bounds.variance_min}, {"variance_max", c.bounds.variance_max},
            {"restarts", c.bounds.restarts}}},
          {"initial_params", kernel_params_to_json(c.initial_params)},
          {"refit_every", c.refit_every},
          {"iv_radius", c.iv_radius},
          {"iv_samples", c.iv_samples}};
}

OptimizerConfig optimizer_config_from_json(const Json& doc) {
  OptimizerConfig c;
  try {
    if (doc.contains("acquisition")) {
      const auto& a = doc["acquisition"];
      c.acquisition.kappa = a.value("kappa", c.acquisition.kappa);
      c.acquisition.n_init_random = a.value("n_init_random", c.acquisition.n_init_random);
      c.acquisition.n_candidates = a.value("n_candidates", c.acquisition.n_candidates);
      c.acquisition.ascent_steps = a.value("ascent_steps", c.acquisition.ascent_steps);
      c.acquisition.ascent_step = a.value("ascent_step", c.acquisition.ascent_step);
      c.acquisition.seed = a.value("seed", c.acquisition.seed);
    }
    if (doc.contains("region")) {
      const auto& r = doc["region"];
      c.region.lower = r.value("lower", c.region.lower);
      c.region.upper = r.value("upper", c.region.upper);
      c.region.lower_sum = r.value("lower_sum", c.region.lower_sum);
      c.region.upper_sum = r.value("upper_sum", c.region.upper_sum);
    }
    if (doc.contains("bounds")) {
      const auto& b = doc["bounds"];
      c.bounds.length_min = b.value("length_min", c.bounds.length_min);
      c.bounds.length_max = b.value("length_max", c.bounds.length_max);
      c.bounds.variance_min = b.value("variance_min", c.bounds.variance_min);
      c.bounds.variance_max = b.value("variance_max", c.bounds.variance_max);
      c.bounds.restarts = b.value("restarts", c.bounds.restarts);
    }
    if (doc.contains("initial_params")) {
      const auto& p = doc["initial_params"];
      c.initial_params.length_scale = p.value("length_scale", c.initial_params.length_scale);
      c.initial_params.signal_variance = p.value("signal_variance", c.initial_params.signal_variance);
      c.initial_params.noise = p.value("noise", c.initial_params.noise);
    }
    c.refit_every = doc.value("refit_every", c.refit_every);
    c.iv_radius = doc.value("iv_radius", c.iv_radius);
    c.iv_samples = doc.value("iv_samples", c.iv_samples);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, std::string("optimizer config: ") + e.what());
  }
  if (!c.initial_params.valid()) throw Error(ErrorCode::kInvalidArgument, "kernel parameters must be positive");
  return c;
}

}  // namespace adaptifont::optimizer
