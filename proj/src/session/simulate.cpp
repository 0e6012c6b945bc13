#include "adaptifont/session/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "adaptifont/error.hpp"
#include "adaptifont/rng.hpp"

namespace adaptifont::session {

namespace {

constexpr std::uint64_t kOracleStream = 0x4f52434c;

class TeeSink : public EventSink {
 public:
  explicit TeeSink(EventSink* next) : next_(next) {}
  void append(const Json& event) override {
    events.push_back(event);
    if (next_) next_->append(event);
  }
  std::vector<Json> events;

 private:
  EventSink* next_;
};

}  // namespace

Json oracle_config_to_json(const OracleConfig& o) {
  return {{"optimum", {o.optimum[0], o.optimum[1], o.optimum[2]}},
          {"peak_wpm", o.peak_wpm},
          {"base_wpm", o.base_wpm},
          {"width", o.width},
          {"noise_sd", o.noise_sd},
          {"seed", o.seed},
          {"reset_below_wpm", o.reset_below_wpm},
          {"max_resets_per_trial", o.max_resets_per_trial},
          {"mc_accuracy", o.mc_accuracy}};
}

OracleConfig oracle_config_from_json(const Json& doc) {
  OracleConfig o;
  try {
    if (doc.contains("optimum")) {
      const auto& c = doc["optimum"];
      o.optimum = FontCoordinates(c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>());
    }
    o.peak_wpm = doc.value("peak_wpm", o.peak_wpm);
    o.base_wpm = doc.value("base_wpm", o.base_wpm);
    o.width = doc.value("width", o.width);
    o.noise_sd = doc.value("noise_sd", o.noise_sd);
    o.seed = doc.value("seed", o.seed);
    o.reset_below_wpm = doc.value("reset_below_wpm", o.reset_below_wpm);
    o.max_resets_per_trial = doc.value("max_resets_per_trial", o.max_resets_per_trial);
    o.mc_accuracy = doc.value("mc_accuracy", o.mc_accuracy);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, std::string("oracle config: ") + e.what());
  }
  return o;
}

double oracle_mean(const OracleConfig& o, const FontCoordinates& c) {
  const double d2 = (c.value - o.optimum.value).squaredNorm();
  return o.base_wpm + (o.peak_wpm - o.base_wpm) * std::exp(-d2 / (2 * o.width * o.width));
}

SimulationResult simulate_session(SessionConfig cfg, const OracleConfig& oracle,
                                  std::shared_ptr<const fontspace::FontBasis> basis, EventSink* sink) {
  if (!cfg.optimizer.region.contains(oracle.optimum))
    throw Error(ErrorCode::kInfeasible, "oracle optimum lies outside the feasible region");
  if (!(oracle.peak_wpm >= oracle.base_wpm && oracle.base_wpm >= 0))
    throw Error(ErrorCode::kInvalidArgument, "oracle needs peak >= base >= 0");
  if (!(oracle.width > 0) || oracle.noise_sd < 0)
    throw Error(ErrorCode::kInvalidArgument, "oracle width must be positive and noise_sd >= 0");
  cfg.mode = Mode::kSimulated;

  VirtualClock vc;
  TeeSink tee(sink);
  char id[32];
  std::snprintf(id, sizeof id, "sim-%llu", static_cast<unsigned long long>(cfg.seed));
  Session s(id, cfg, std::move(basis), vc.clock(), &tee);
  Rng rng = make_rng({oracle.seed, kOracleStream});

  SimulationResult out;
  while (!s.complete()) {
    const Trial t = s.next_trial();
    vc.advance(cfg.gate_delay_ms);
    const TextRelease text = s.release_text(t.trial_id);
    double wpm = oracle_mean(oracle, t.coords);
    if (oracle.noise_sd > 0) wpm += oracle.noise_sd * standard_normal(rng);
    wpm = std::max(0.0, wpm);
    if (wpm <= std::max(0.0, oracle.reset_below_wpm) && t.attempt < oracle.max_resets_per_trial) {
      vc.advance(1000);
      s.reset_trial(t.trial_id);
      continue;
    }
    // a reader who is out of resets still finishes, at a floor speed
    const double duration = text.word_count * 60000.0 / std::max(wpm, 1.0);
    vc.advance(duration);
    const TextItem& item = s.text(t.text_id);
    std::optional<int> mc;
    if (t.has_mc) {
      const bool right = uniform(rng, 0.0, 1.0) < oracle.mc_accuracy;
      mc = right ? item.mc->correct_index : (item.mc->correct_index + 1) % 6;
    }
    s.submit_result(t.trial_id, duration, item.expected_detections, mc);
    vc.advance(500);
  }
  out.events = std::move(tee.events);
  out.results = s.results();
  out.resets = s.reset_count();
  return out;
}

}  // namespace adaptifont::session
