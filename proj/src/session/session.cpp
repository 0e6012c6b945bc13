#include "adaptifont/session/session.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>

#include "adaptifont/error.hpp"
#include "adaptifont/rng.hpp"
#include "adaptifont/utf8.hpp"

namespace adaptifont::session {

namespace {

constexpr std::uint64_t kShuffleStream = 0x53485546;
constexpr std::uint64_t kMcStream = 0x4d43;

Json coords_json(const FontCoordinates& c) { return Json::array({c[0], c[1], c[2]}); }

FontCoordinates coords_from(const Json& j) {
  return FontCoordinates(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

Mode mode_from(const std::string& s) {
  if (s == "live") return Mode::kLive;
  if (s == "simulated") return Mode::kSimulated;
  throw Error(ErrorCode::kMalformedInput, "unknown mode: " + s);
}

}  // namespace

const char* to_string(Mode m) { return m == Mode::kLive ? "live" : "simulated"; }

const char* to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::kPending: return "pending";
    case TrialStatus::kReading: return "reading";
    case TrialStatus::kDone: return "done";
    case TrialStatus::kReset: return "reset";
  }
  return "?";
}

Json session_config_to_json(const SessionConfig& c) {
  return {{"texts", corpus_to_json(c.texts)},
          {"n_trials", c.n_trials},
          {"seed", c.seed},
          {"gate_delay_ms", c.gate_delay_ms},
          {"n_mc_trials", c.n_mc_trials},
          {"mc_trial_indices", c.mc_trial_indices},
          {"optimizer", optimizer::optimizer_config_to_json(c.optimizer)},
          {"score",
           {{"detection_weight", c.score.detection_weight},
            {"mc_correct", c.score.mc_correct},
            {"mc_wrong", c.score.mc_wrong}}},
          {"threshold", c.threshold},
          {"mode", to_string(c.mode)}};
}

SessionConfig session_config_from_json(const Json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw Error(ErrorCode::kMalformedInput, "session config must be an object");
  SessionConfig c;
  try {
    if (doc.contains("texts")) {
      c.texts = corpus_from_json(doc["texts"]);
    } else if (doc.contains("corpus")) {
      std::filesystem::path p = doc["corpus"].get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      c.texts = load_corpus(p);
    }
    c.n_trials = doc.value("n_trials", c.n_trials);
    c.seed = doc.value("seed", c.seed);
    c.gate_delay_ms = doc.value("gate_delay_ms", c.gate_delay_ms);
    c.n_mc_trials = doc.value("n_mc_trials", c.n_mc_trials);
    c.mc_trial_indices = doc.value("mc_trial_indices", c.mc_trial_indices);
    if (doc.contains("optimizer")) c.optimizer = optimizer::optimizer_config_from_json(doc["optimizer"]);
    if (doc.contains("score")) {
      const auto& s = doc["score"];
      c.score.detection_weight = s.value("detection_weight", c.score.detection_weight);
      c.score.mc_correct = s.value("mc_correct", c.score.mc_correct);
      c.score.mc_wrong = s.value("mc_wrong", c.score.mc_wrong);
    }
    c.threshold = doc.value("threshold", c.threshold);
    c.mode = mode_from(doc.value("mode", std::string("live")));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, std::string("session config: ") + e.what());
  }
  return c;
}

FileSink::FileSink(const std::filesystem::path& path) : out_(path, std::ios::app) {
  if (!out_) throw Error(ErrorCode::kIo, "cannot open log " + path.string());
}

void FileSink::append(const Json& event) {
  out_ << event.dump() << '\n';
  out_.flush();
  if (!out_) throw Error(ErrorCode::kIo, "log write failed");
}

double wall_clock_ms() {
  using namespace std::chrono;
  return static_cast<double>(duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count());
}

std::string make_session_id(std::uint64_t seed, std::uint64_t counter) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "s%016llx", static_cast<unsigned long long>(derive_seed({seed, counter})));
  return buf;
}

Session::Session(Restore, std::string id, SessionConfig cfg, std::shared_ptr<const fontspace::FontBasis> basis,
                 Clock clock)
    : id_(std::move(id)), cfg_(std::move(cfg)), basis_(std::move(basis)), clock_(std::move(clock)),
      optimizer_([&] {
        auto o = cfg_.optimizer;
        o.acquisition.seed = cfg_.seed;
        return o;
      }()) {
  cfg_.optimizer.acquisition.seed = cfg_.seed;
  init_schedule();
}

Session::Session(std::string id, SessionConfig cfg, std::shared_ptr<const fontspace::FontBasis> basis, Clock clock,
                 EventSink* sink)
    : Session(Restore{}, std::move(id), std::move(cfg), std::move(basis), std::move(clock)) {
  sink_ = sink;
  Json mc = mc_indices_;
  emit("start", {{"config", session_config_to_json(cfg_)}, {"schedule", schedule_}, {"mc_trial_indices", mc}});
}

void Session::init_schedule() {
  if (cfg_.n_trials < 1) throw Error(ErrorCode::kInvalidArgument, "n_trials must be positive");
  if (static_cast<std::size_t>(cfg_.n_trials) > cfg_.texts.size())
    throw Error(ErrorCode::kInvalidArgument, "corpus has " + std::to_string(cfg_.texts.size()) +
                                                 " texts, fewer than n_trials = " + std::to_string(cfg_.n_trials));
  if (cfg_.gate_delay_ms < 0) throw Error(ErrorCode::kInvalidArgument, "gate_delay_ms must be >= 0");
  for (std::size_t i = 0; i < cfg_.texts.size(); ++i) {
    if (!text_lookup_.emplace(cfg_.texts[i].id, i).second)
      throw Error(ErrorCode::kMalformedInput, "duplicate text id: " + cfg_.texts[i].id);
  }

  std::vector<std::size_t> order(cfg_.texts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = make_rng({cfg_.seed, kShuffleStream});
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
  for (int i = 0; i < cfg_.n_trials; ++i) schedule_.push_back(cfg_.texts[order[static_cast<std::size_t>(i)]].id);

  if (basis_) {
    for (const auto& tid : schedule_) {
      for (char32_t ch : decode_utf8(text(tid).body)) {
        if (ch == U' ' || ch == U'\n' || ch == U'\t' || ch == U'\r') continue;
        if (basis_->layout.glyph_index(ch) < 0)
          throw Error(ErrorCode::kInvalidArgument, "text " + tid + " uses a character outside the glyph set: " +
                                                       encode_utf8(ch));
      }
    }
  }

  if (!cfg_.mc_trial_indices.empty()) {
    std::set<int> seen;
    for (int i : cfg_.mc_trial_indices) {
      if (i < 0 || i >= cfg_.n_trials) throw Error(ErrorCode::kInvalidArgument, "mc trial index out of range");
      if (!text(schedule_[static_cast<std::size_t>(i)]).mc)
        throw Error(ErrorCode::kInvalidArgument, "mc trial " + std::to_string(i) + " has no question");
      if (!seen.insert(i).second) throw Error(ErrorCode::kInvalidArgument, "duplicate mc trial index");
    }
    mc_indices_ = cfg_.mc_trial_indices;
  } else {
    std::vector<int> eligible;
    for (int i = 0; i < cfg_.n_trials; ++i) {
      if (text(schedule_[static_cast<std::size_t>(i)]).mc) eligible.push_back(i);
    }
    Rng mrng = make_rng({cfg_.seed, kMcStream});
    const int want = std::min<int>(std::max(0, cfg_.n_mc_trials), static_cast<int>(eligible.size()));
    for (int i = 0; i < want; ++i) {
      const std::size_t j = static_cast<std::size_t>(i) + uniform_index(mrng, eligible.size() - static_cast<std::size_t>(i));
      std::swap(eligible[static_cast<std::size_t>(i)], eligible[j]);
      mc_indices_.push_back(eligible[static_cast<std::size_t>(i)]);
    }
  }
  std::sort(mc_indices_.begin(), mc_indices_.end());
}

void Session::emit(const char* event, Json payload) {
  if (!sink_) return;
  sink_->append({{"ts", clock_()}, {"session_id", id_}, {"event", event}, {"payload", std::move(payload)}});
}

const TextItem& Session::text(const std::string& text_id) const {
  auto it = text_lookup_.find(text_id);
  if (it == text_lookup_.end()) throw Error(ErrorCode::kNotFound, "unknown text " + text_id);
  return cfg_.texts[it->second];
}

const Trial* Session::active_trial() const { return active_ ? &trials_[*active_] : nullptr; }

const Trial& Session::trial(long trial_id) const {
  if (trial_id < 1 || static_cast<std::size_t>(trial_id) > trials_.size())
    throw Error(ErrorCode::kNotFound, "unknown trial " + std::to_string(trial_id));
  return trials_[static_cast<std::size_t>(trial_id - 1)];
}

Trial& Session::active_or_throw(long trial_id) {
  trial(trial_id);
  if (!active_ || trials_[*active_].trial_id != trial_id)
    throw Error(ErrorCode::kConflict, "trial " + std::to_string(trial_id) + " is not active");
  return trials_[*active_];
}

const Trial& Session::next_trial() {
  if (active_) return trials_[*active_];
  int index;
  int attempt = 0;
  if (pending_reissue_ >= 0) {
    index = pending_reissue_;
    for (const auto& t : trials_) attempt += t.index == index;
  } else {
    if (next_index_ >= cfg_.n_trials) throw Error(ErrorCode::kSessionComplete, "session complete");
    index = next_index_;
  }
  const optimizer::Proposal p = optimizer_.propose();

  Trial t;
  t.trial_id = static_cast<long>(trials_.size()) + 1;
  t.index = index;
  t.attempt = attempt;
  t.text_id = schedule_[static_cast<std::size_t>(index)];
  t.category = text(t.text_id).category;
  t.coords = p.c;
  t.phase = p.phase;
  t.call = p.call;
  t.issued_ms = clock_();
  t.gate_open_ms = t.issued_ms + cfg_.gate_delay_ms;
  t.has_mc = std::binary_search(mc_indices_.begin(), mc_indices_.end(), index);
  if (basis_) {
    fontgen::BuildOptions bo;
    bo.threshold = cfg_.threshold;
    bo.region = cfg_.optimizer.region;
    fonts_.emplace(t.trial_id, fontgen::build_font(t.coords, *basis_, bo));
  }
  trials_.push_back(t);
  active_ = trials_.size() - 1;
  if (pending_reissue_ >= 0) {
    pending_reissue_ = -1;
  } else {
    ++next_index_;
  }
  emit("propose", {{"trial_id", t.trial_id},
                   {"index", t.index},
                   {"attempt", t.attempt},
                   {"text_id", t.text_id},
                   {"call", t.call},
                   {"phase", optimizer::to_string(t.phase)},
                   {"coords", coords_json(t.coords)},
                   {"params", optimizer::kernel_params_to_json(optimizer_.state().params())},
                   {"n_observations", optimizer_.state().size()}});
  return trials_.back();
}

TextRelease Session::release_text(long trial_id) {
  Trial& t = active_or_throw(trial_id);
  const TextItem& item = text(t.text_id);
  if (t.status == TrialStatus::kPending) {
    const double now = clock_();
    if (now < t.gate_open_ms) throw Error(ErrorCode::kGateClosed, "text is gated for another " +
                                                                      std::to_string(t.gate_open_ms - now) + " ms");
    t.status = TrialStatus::kReading;
    emit("reading", {{"trial_id", t.trial_id}});
  }
  return {item.body, word_count(item.body)};
}

Json Session::record_payload(const Trial& t, double wpm, const optimizer::RecordOutcome& r) const {
  return {{"trial_id", t.trial_id},
          {"index", t.index},
          {"text_id", t.text_id},
          {"coords", coords_json(t.coords)},
          {"wpm", wpm},
          {"iv_before", r.iv_before},
          {"iv_after", r.iv_after},
          {"refit", r.refit},
          {"params", optimizer::kernel_params_to_json(optimizer_.state().params())}};
}

TrialResult Session::submit_result(long trial_id, double duration_ms, int presses, std::optional<int> mc_answer) {
  Trial& t = active_or_throw(trial_id);
  if (t.status != TrialStatus::kReading)
    throw Error(ErrorCode::kConflict, "trial " + std::to_string(trial_id) + " has not started reading");
  if (!(duration_ms > 0) || !std::isfinite(duration_ms))
    throw Error(ErrorCode::kInvalidArgument, "duration_ms must be positive");
  if (presses < 0) throw Error(ErrorCode::kInvalidArgument, "press_count must be >= 0");
  const TextItem& item = text(t.text_id);
  if (t.has_mc) {
    if (!mc_answer) throw Error(ErrorCode::kInvalidArgument, "trial requires a multiple-choice answer");
    if (*mc_answer < 0 || *mc_answer >= static_cast<int>(item.mc->options.size()))
      throw Error(ErrorCode::kInvalidArgument, "mc_answer out of range");
  } else if (mc_answer) {
    throw Error(ErrorCode::kInvalidArgument, "trial has no multiple-choice question");
  }

  TrialResult r;
  r.trial_id = t.trial_id;
  r.index = t.index;
  r.text_id = t.text_id;
  r.coords = t.coords;
  r.duration_ms = duration_ms;
  r.word_count = word_count(item.body);
  r.wpm = words_per_minute(r.word_count, duration_ms);
  r.presses = presses;
  r.expected_detections = item.expected_detections;
  if (mc_answer) {
    r.mc_answer = mc_answer;
    r.mc_correct = *mc_answer == item.mc->correct_index;
    emit("mc", {{"trial_id", t.trial_id}, {"answer", *mc_answer}, {"correct", *r.mc_correct}});
  }
  r.score = compute_score(r.wpm, presses, item.expected_detections, r.mc_correct, cfg_.score);

  const auto outcome = optimizer_.record({t.coords, r.wpm});
  r.iv_before = outcome.iv_before;
  r.iv_after = outcome.iv_after;
  r.refit = outcome.refit;
  t.status = TrialStatus::kDone;
  active_.reset();
  results_.push_back(r);

  Json payload = record_payload(t, r.wpm, outcome);
  payload["duration_ms"] = duration_ms;
  payload["press_count"] = presses;
  payload["expected_detections"] = r.expected_detections;
  payload["word_count"] = r.word_count;
  payload["score"] = r.score;
  payload["mc_answer"] = mc_answer ? Json(*mc_answer) : Json(nullptr);
  emit("result", std::move(payload));
  return r;
}

optimizer::RecordOutcome Session::abandon(long trial_id) {
  Trial& t = active_or_throw(trial_id);
  const auto outcome = optimizer_.record({t.coords, 0.0});
  t.status = TrialStatus::kReset;
  active_.reset();
  pending_reissue_ = t.index;
  ++resets_;
  emit("reset", record_payload(t, 0.0, outcome));
  return outcome;
}

const Trial& Session::reset_trial(long trial_id) {
  abandon(trial_id);
  return next_trial();
}

const fontgen::SynthFont& Session::font(long trial_id) {
  const Trial& t = trial(trial_id);
  if (!basis_) throw Error(ErrorCode::kNotFound, "session has no font basis");
  auto it = fonts_.find(trial_id);
  if (it == fonts_.end()) {
    fontgen::BuildOptions bo;
    bo.threshold = cfg_.threshold;
    bo.region = cfg_.optimizer.region;
    it = fonts_.emplace(trial_id, fontgen::build_font(t.coords, *basis_, bo)).first;
  }
  return it->second;
}

Json Session::snapshot() const {
  Json s = {{"session_id", id_},
            {"trials_issued", trials_.size()},
            {"trials_done", results_.size()},
            {"resets", resets_},
            {"observations", optimizer_.state().size()},
            {"params", optimizer::kernel_params_to_json(optimizer_.state().params())},
            {"complete", complete()}};
  if (const Trial* a = active_trial()) {
    s["active"] = {{"trial_id", a->trial_id}, {"index", a->index}, {"status", to_string(a->status)}};
  }
  return s;
}

std::unique_ptr<Session> Session::recover(const std::vector<Json>& events,
                                          std::shared_ptr<const fontspace::FontBasis> basis, Clock clock,
                                          EventSink* sink) {
  if (events.empty() || events.front().value("event", "") != "start")
    throw Error(ErrorCode::kMalformedInput, "log does not begin with a start event");
  auto now = std::make_shared<double>(0.0);
  std::unique_ptr<Session> s;
  try {
    const Json& start = events.front();
    *now = start.at("ts").get<double>();
    SessionConfig cfg = session_config_from_json(start.at("payload").at("config"));
    s.reset(new Session(Restore{}, start.at("session_id").get<std::string>(), std::move(cfg), std::move(basis),
                        [now] { return *now; }));
    if (start["payload"].at("schedule").get<std::vector<std::string>>() != s->schedule_)
      throw Error(ErrorCode::kReplayMismatch, "schedule differs from log");

    auto mismatch = [](const std::string& what, long tid) {
      return Error(ErrorCode::kReplayMismatch, what + " differs from log at trial " + std::to_string(tid));
    };
    for (std::size_t i = 1; i < events.size(); ++i) {
      const Json& e = events[i];
      if (e.at("session_id").get<std::string>() != s->id_) throw Error(ErrorCode::kMalformedInput, "foreign event");
      *now = e.at("ts").get<double>();
      const std::string kind = e.at("event").get<std::string>();
      const Json& p = e.at("payload");
      const long tid = p.value("trial_id", 0L);
      if (kind == "propose") {
        const Trial& t = s->next_trial();
        if (t.trial_id != tid || t.call != p.at("call").get<long>() || t.text_id != p.at("text_id").get<std::string>())
          throw mismatch("proposal", tid);
        if (!(t.coords == coords_from(p.at("coords")))) throw mismatch("proposed coordinates", tid);
      } else if (kind == "reading") {
        s->release_text(tid);
      } else if (kind == "mc") {
        continue;
      } else if (kind == "result") {
        std::optional<int> mc;
        if (p.contains("mc_answer") && !p["mc_answer"].is_null()) mc = p["mc_answer"].get<int>();
        const TrialResult r =
            s->submit_result(tid, p.at("duration_ms").get<double>(), p.at("press_count").get<int>(), mc);
        if (r.wpm != p.at("wpm").get<double>() || r.score != p.at("score").get<long>()) throw mismatch("result", tid);
      } else if (kind == "reset") {
        s->abandon(tid);
      } else {
        throw Error(ErrorCode::kMalformedInput, "unknown event kind: " + kind);
      }
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, std::string("log: ") + e.what());
  }
  s->clock_ = std::move(clock);
  s->sink_ = sink;
  return s;
}

}  // namespace adaptifont::session
