#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adaptifont/fontgen/font.hpp"
#include "adaptifont/json_io.hpp"
#include "adaptifont/optimizer/bayes_optimizer.hpp"
#include "adaptifont/session/corpus.hpp"
#include "adaptifont/session/score.hpp"

namespace adaptifont::session {

using fontgen::FontCoordinates;

enum class Mode { kLive, kSimulated };
const char* to_string(Mode m);

struct SessionConfig {
  std::vector<TextItem> texts;
  int n_trials = 95;
  std::uint64_t seed = 0;
  double gate_delay_ms = 2000;
  int n_mc_trials = 11;
  std::vector<int> mc_trial_indices;  // empty: drawn from the seed
  optimizer::OptimizerConfig optimizer;
  ScoreWeights score;
  double threshold = 0.5;
  Mode mode = Mode::kLive;
};

Json session_config_to_json(const SessionConfig& cfg);
/// Texts come from "texts" (inline array) or "corpus" (path, relative to
/// `base_dir`).
SessionConfig session_config_from_json(const Json& doc, const std::filesystem::path& base_dir = {});

enum class TrialStatus { kPending, kReading, kDone, kReset };
const char* to_string(TrialStatus s);

struct Trial {
  long trial_id = 0;   // unique per issue, reissues get a new id
  int index = 0;       // position in the schedule
  int attempt = 0;     // number of earlier resets of this index
  std::string text_id;
  std::string category;
  FontCoordinates coords;
  optimizer::Phase phase = optimizer::Phase::kInit;
  long call = 0;
  TrialStatus status = TrialStatus::kPending;
  double issued_ms = 0;
  double gate_open_ms = 0;
  bool has_mc = false;
};

struct TrialResult {
  long trial_id = 0;
  int index = 0;
  std::string text_id;
  FontCoordinates coords;
  double duration_ms = 0;
  int word_count = 0;
  double wpm = 0;
  int presses = 0;
  int expected_detections = 0;
  std::optional<int> mc_answer;
  std::optional<bool> mc_correct;
  long score = 0;
  double iv_before = 0;
  double iv_after = 0;
  bool refit = false;
};

struct TextRelease {
  std::string text;
  int word_count = 0;
};

/// Receives log events in order; implementations must persist before
/// returning.
class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void append(const Json& event) = 0;
};

class MemorySink : public EventSink {
 public:
  void append(const Json& event) override { events.push_back(event); }
  std::vector<Json> events;
};

/// Append-only JSON-lines file, flushed per event.
class FileSink : public EventSink {
 public:
  explicit FileSink(const std::filesystem::path& path);
  void append(const Json& event) override;

 private:
  std::ofstream out_;
};

using Clock = std::function<double()>;
/// Wall-clock milliseconds since the epoch.
double wall_clock_ms();

/// One reader's run through the trial protocol. Not thread-safe; callers
/// serialize access.
class Session {
 public:
  /// Validates the config, fixes the schedule and logs the start event.
  Session(std::string id, SessionConfig cfg, std::shared_ptr<const fontspace::FontBasis> basis, Clock clock,
          EventSink* sink);

  /// Rebuilds a session by re-executing a log; every logged proposal and
  /// result must be reproduced exactly (Error kReplayMismatch otherwise).
  /// Further events go to `sink`.
  static std::unique_ptr<Session> recover(const std::vector<Json>& events,
                                          std::shared_ptr<const fontspace::FontBasis> basis, Clock clock,
                                          EventSink* sink);

  /// Issues the next trial, or returns the active one unchanged.
  const Trial& next_trial();
  /// Text payload of the active trial once the gate delay has elapsed.
  TextRelease release_text(long trial_id);
  TrialResult submit_result(long trial_id, double duration_ms, int presses, std::optional<int> mc_answer);
  /// Records 0 wpm for the active trial's font and reissues its text.
  const Trial& reset_trial(long trial_id);

  bool complete() const { return next_index_ >= cfg_.n_trials && !active_; }
  const std::string& id() const { return id_; }
  const SessionConfig& config() const { return cfg_; }
  const std::vector<std::string>& schedule() const { return schedule_; }
  const std::vector<int>& mc_trial_indices() const { return mc_indices_; }
  const std::vector<Trial>& trials() const { return trials_; }
  const std::vector<TrialResult>& results() const { return results_; }
  const Trial* active_trial() const;
  const Trial& trial(long trial_id) const;
  const TextItem& text(const std::string& text_id) const;
  const optimizer::BayesOptimizer& optimizer() const { return optimizer_; }
  int reset_count() const { return resets_; }
  bool has_basis() const { return basis_ != nullptr; }
  /// Font of any issued trial, built on first request and cached.
  const fontgen::SynthFont& font(long trial_id);
  Json snapshot() const;

 private:
  struct Restore {};
  Session(Restore, std::string id, SessionConfig cfg, std::shared_ptr<const fontspace::FontBasis> basis,
          Clock clock);
  void init_schedule();
  void emit(const char* event, Json payload);
  Trial& active_or_throw(long trial_id);
  optimizer::RecordOutcome abandon(long trial_id);
  Json record_payload(const Trial& t, double wpm, const optimizer::RecordOutcome& r) const;

  std::string id_;
  SessionConfig cfg_;
  std::shared_ptr<const fontspace::FontBasis> basis_;
  Clock clock_;
  EventSink* sink_ = nullptr;
  optimizer::BayesOptimizer optimizer_;
  std::vector<std::string> schedule_;
  std::vector<int> mc_indices_;
  std::map<std::string, std::size_t> text_lookup_;
  std::vector<Trial> trials_;
  std::vector<TrialResult> results_;
  std::map<long, fontgen::SynthFont> fonts_;
  std::optional<std::size_t> active_;
  int next_index_ = 0;
  int pending_reissue_ = -1;  // schedule index to reissue after a reset
  int resets_ = 0;
};

/// Fresh session id; deterministic in (seed, counter).
std::string make_session_id(std::uint64_t seed, std::uint64_t counter);

}  // namespace adaptifont::session
