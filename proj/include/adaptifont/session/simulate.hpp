#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "adaptifont/session/session.hpp"

namespace adaptifont::session {

/// Simulated reader: a Gaussian bump of reading speed around `optimum`.
struct OracleConfig {
  FontCoordinates optimum{4.0, 5.0, 4.0};
  double peak_wpm = 300;
  double base_wpm = 150;
  double width = 2.0;  // s in exp(-|c - c*|^2 / (2 s^2))
  double noise_sd = 0;
  std::uint64_t seed = 0;
  double reset_below_wpm = 0;  // resets fonts read at or below this speed
  int max_resets_per_trial = 10;
  double mc_accuracy = 0.8;
};

Json oracle_config_to_json(const OracleConfig& o);
OracleConfig oracle_config_from_json(const Json& doc);

/// Noiseless oracle value at c.
double oracle_mean(const OracleConfig& o, const FontCoordinates& c);

/// Clock whose time only moves when told to.
class VirtualClock {
 public:
  double now() const { return now_; }
  void advance(double ms) { now_ += ms; }
  Clock clock() const {
    return [this] { return now_; };
  }

 private:
  double now_ = 0;
};

struct SimulationResult {
  std::vector<Json> events;
  std::vector<TrialResult> results;
  int resets = 0;
};

/// Runs a whole session against the oracle on a virtual clock and returns
/// the same event log a live session writes. `sink` (optional) receives
/// the events as they happen.
SimulationResult simulate_session(SessionConfig cfg, const OracleConfig& oracle,
                                  std::shared_ptr<const fontspace::FontBasis> basis = nullptr,
                                  EventSink* sink = nullptr);

}  // namespace adaptifont::session
