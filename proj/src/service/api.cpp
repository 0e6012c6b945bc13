#include "adaptifont/service/api.hpp"

#include <regex>

#include <httplib.h>

#include "adaptifont/analysis/report.hpp"
#include "adaptifont/error.hpp"
#include "adaptifont/fontgen/svg.hpp"
#include "adaptifont/utf8.hpp"

namespace adaptifont::service {

using session::Session;
using session::Trial;

namespace {

class TeeFileSink : public session::EventSink {
 public:
  explicit TeeFileSink(const std::filesystem::path& path) {
    if (!path.empty()) file_ = std::make_unique<session::FileSink>(path);
  }
  void append(const Json& event) override {
    if (file_) file_->append(event);
    events.push_back(event);
  }
  std::vector<Json> events;

 private:
  std::unique_ptr<session::FileSink> file_;
};

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  try {
    return Json::parse(body);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, std::string("request body is not JSON: ") + e.what());
  }
}

Response json_response(int status, const Json& doc) { return {status, "application/json", doc.dump()}; }

bool valid_name(const std::string& s) { return std::regex_match(s, std::regex("[A-Za-z0-9_-]{1,64}")); }

}  // namespace

struct Api::Entry {
  std::mutex mutex;
  std::unique_ptr<TeeFileSink> sink;
  std::unique_ptr<Session> session;
  std::map<std::string, Response> idempotent;
};

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kMalformedInput:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kOutOfRange:
    case ErrorCode::kInconsistentCorpus: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConflict:
    case ErrorCode::kSessionComplete: return 409;
    case ErrorCode::kInfeasible: return 422;
    case ErrorCode::kGateClosed: return 425;
    default: return 500;
  }
}

Response error_response(ErrorCode code, const std::string& message) {
  return json_response(http_status(code), {{"error", {{"code", to_string(code)}, {"message", message}}}});
}

Api::Api(ServiceConfig cfg) : cfg_(std::move(cfg)) {
  if (!cfg_.data_dir.empty()) std::filesystem::create_directories(cfg_.data_dir / "sessions");
}

Api::~Api() = default;

std::size_t Api::session_count() const {
  std::shared_lock lock(registry_mutex_);
  return sessions_.size();
}

std::filesystem::path Api::log_path(const std::string& id) const {
  if (cfg_.data_dir.empty()) return {};
  return cfg_.data_dir / "sessions" / (id + ".jsonl");
}

void Api::write_snapshot(Entry& e) {
  if (cfg_.data_dir.empty()) return;
  write_json_file(cfg_.data_dir / "sessions" / (e.session->id() + ".snapshot.json"), e.session->snapshot(), 2);
}

int Api::recover_sessions() {
  if (cfg_.data_dir.empty()) return 0;
  int n = 0;
  std::vector<std::filesystem::path> logs;
  for (const auto& f : std::filesystem::directory_iterator(cfg_.data_dir / "sessions")) {
    if (f.path().extension() == ".jsonl") logs.push_back(f.path());
  }
  std::sort(logs.begin(), logs.end());
  std::unique_lock lock(registry_mutex_);
  for (const auto& p : logs) {
    auto events = read_json_lines(p);
    if (events.empty()) continue;
    auto e = std::make_unique<Entry>();
    e->sink = std::make_unique<TeeFileSink>(p);
    e->sink->events = events;
    e->session = Session::recover(events, cfg_.basis, cfg_.clock, e->sink.get());
    sessions_[e->session->id()] = std::move(e);
    ++counter_;
    ++n;
  }
  return n;
}

Response Api::create_session(const std::string& body) {
  const Json req = parse_body(body);
  if (!req.is_object()) throw Error(ErrorCode::kMalformedInput, "request body must be an object");
  Json doc = cfg_.default_config;
  if (req.contains("config_ref")) {
    const auto name = req["config_ref"].get<std::string>();
    if (!valid_name(name)) throw Error(ErrorCode::kInvalidArgument, "bad config_ref");
    const auto path = cfg_.data_dir / "configs" / (name + ".json");
    if (cfg_.data_dir.empty() || !std::filesystem::exists(path))
      throw Error(ErrorCode::kNotFound, "unknown config_ref " + name);
    doc.merge_patch(read_json_file(path));
  }
  if (req.contains("config")) doc.merge_patch(req["config"]);

  std::unique_lock lock(registry_mutex_);
  const std::uint64_t counter = ++counter_;
  if (!doc.contains("seed")) doc["seed"] = derive_seed({cfg_.seed, counter});
  session::SessionConfig sc = session::session_config_from_json(doc, cfg_.data_dir);
  std::string id = session::make_session_id(cfg_.seed, counter);
  while (sessions_.count(id)) id = session::make_session_id(cfg_.seed, ++counter_);

  auto e = std::make_unique<Entry>();
  e->sink = std::make_unique<TeeFileSink>(log_path(id));
  e->session = std::make_unique<Session>(id, std::move(sc), cfg_.basis, cfg_.clock, e->sink.get());
  write_snapshot(*e);
  const Json out = {{"session_id", id},
                    {"n_trials", e->session->config().n_trials},
                    {"gate_delay_ms", e->session->config().gate_delay_ms}};
  sessions_[id] = std::move(e);
  return json_response(201, out);
}

Response Api::with_session(const std::string& id, const std::function<Response(Entry&)>& fn) {
  Entry* e = nullptr;
  {
    std::shared_lock lock(registry_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::kNotFound, "unknown session " + id);
    e = it->second.get();
  }
  std::lock_guard guard(e->mutex);
  return fn(*e);
}

Json Api::trial_payload(Entry& e, const Trial& t) {
  Session& s = *e.session;
  const auto& cfg = s.config();
  Json p = {{"trial_id", t.trial_id},
            {"index", t.index},
            {"attempt", t.attempt},
            {"n_trials", cfg.n_trials},
            {"text_id", t.text_id},
            {"category", t.category},
            {"coords", {t.coords[0], t.coords[1], t.coords[2]}},
            {"phase", optimizer::to_string(t.phase)},
            {"gate_delay_ms", cfg.gate_delay_ms},
            {"gate_open_in_ms", std::max(0.0, t.gate_open_ms - cfg_.clock())},
            {"text", nullptr},
            {"mc", nullptr}};
  if (t.has_mc) {
    const auto& q = *s.text(t.text_id).mc;
    p["mc"] = {{"question", q.question}, {"options", q.options}};
  }
  if (s.has_basis()) {
    const auto& font = s.font(t.trial_id);
    Json glyphs = Json::array();
    for (const auto& g : font.outlines) {
      glyphs.push_back({{"char", encode_utf8(g.character)},
                        {"path_data", fontgen::path_data(g.contours)},
                        {"advance", g.advance_width},
                        {"lsb", g.left_side_bearing}});
    }
    p["font"] = {{"units_per_em", font.units_per_em},
                 {"ascent", font.ascent},
                 {"descent", font.descent},
                 {"glyphs", std::move(glyphs)}};
  } else {
    p["font"] = nullptr;
  }
  return p;
}

Response Api::handle(const std::string& method, const std::string& path, const std::string& body,
                     const std::string& idempotency_key) {
  static const std::regex kTrial("^/api/session/([A-Za-z0-9_-]+)/trial$");
  static const std::regex kText("^/api/session/([A-Za-z0-9_-]+)/trial/text$");
  static const std::regex kAction("^/api/session/([A-Za-z0-9_-]+)/trial/([0-9]+)/(result|reset)$");
  static const std::regex kAnalysis("^/api/session/([A-Za-z0-9_-]+)/analysis$");
  static const std::regex kFont("^/api/session/([A-Za-z0-9_-]+)/font/([0-9]+)\\.svg$");
  std::smatch m;
  try {
    if (path == "/api/session") {
      if (method != "POST") return error_response(ErrorCode::kInvalidArgument, "method not allowed");
      return create_session(body);
    }
    if (std::regex_match(path, m, kTrial) && method == "GET") {
      return with_session(m[1], [&](Entry& e) {
        const Trial& t = e.session->next_trial();
        write_snapshot(e);
        return json_response(200, trial_payload(e, t));
      });
    }
    if (std::regex_match(path, m, kText) && method == "GET") {
      return with_session(m[1], [&](Entry& e) {
        const Trial* t = e.session->active_trial();
        if (!t) throw Error(ErrorCode::kConflict, "no active trial");
        const auto rel = e.session->release_text(t->trial_id);
        return json_response(200, {{"trial_id", t->trial_id}, {"text", rel.text}, {"word_count", rel.word_count}});
      });
    }
    if (std::regex_match(path, m, kAction) && method == "POST") {
      const long tid = std::stol(m[2]);
      const std::string action = m[3];
      return with_session(m[1], [&](Entry& e) {
        const std::string key = idempotency_key.empty() ? "" : action + ":" + m[2].str() + ":" + idempotency_key;
        if (!key.empty()) {
          auto it = e.idempotent.find(key);
          if (it != e.idempotent.end()) return it->second;
        }
        Response r;
        if (action == "result") {
          const Json req = parse_body(body);
          if (!req.contains("duration_ms") || !req["duration_ms"].is_number())
            throw Error(ErrorCode::kInvalidArgument, "duration_ms is required");
          std::optional<int> mc;
          if (req.contains("mc_answer") && !req["mc_answer"].is_null()) mc = req["mc_answer"].get<int>();
          const auto res = e.session->submit_result(tid, req["duration_ms"].get<double>(),
                                                    req.value("press_count", 0), mc);
          Json feedback = {{"wpm", res.wpm},
                           {"presses", res.presses},
                           {"expected_detections", res.expected_detections},
                           {"detection_accuracy", session::detection_accuracy(res.presses, res.expected_detections)},
                           {"mc_correct", res.mc_correct ? Json(*res.mc_correct) : Json(nullptr)},
                           {"score", res.score}};
          r = json_response(200, {{"trial_id", tid},
                                  {"wpm", res.wpm},
                                  {"score", res.score},
                                  {"word_count", res.word_count},
                                  {"feedback", feedback},
                                  {"complete", e.session->complete()}});
        } else {
          const Trial& t = e.session->reset_trial(tid);
          r = json_response(200, trial_payload(e, t));
        }
        write_snapshot(e);
        if (!key.empty()) e.idempotent[key] = r;
        return r;
      });
    }
    if (std::regex_match(path, m, kAnalysis) && method == "GET") {
      return with_session(m[1], [&](Entry& e) {
        return json_response(200, analysis::analysis_report(analysis::points_from_log(e.sink->events)));
      });
    }
    if (std::regex_match(path, m, kFont) && method == "GET") {
      const long tid = std::stol(m[2]);
      return with_session(m[1], [&](Entry& e) {
        return Response{200, "image/svg+xml", fontgen::emit_svg_font(e.session->font(tid))};
      });
    }
    return error_response(ErrorCode::kNotFound, "no route for " + method + " " + path);
  } catch (const Error& e) {
    return error_response(e.code(), e.what());
  } catch (const Json::exception& e) {
    return error_response(ErrorCode::kMalformedInput, e.what());
  } catch (const std::exception& e) {
    return error_response(ErrorCode::kIo, e.what());
  }
}

void Api::bind(httplib::Server& server) {
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    const Response r = handle(req.method, req.path, req.body, req.get_header_value("Idempotency-Key"));
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Post("/api/session", forward);
  server.Get(R"(/api/session/.*)", forward);
  server.Post(R"(/api/session/.*)", forward);
}

}  // namespace adaptifont::service
