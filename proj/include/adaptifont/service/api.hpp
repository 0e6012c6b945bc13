#pragma once

#include <cstdint>
#include <functional>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

#include "adaptifont/error.hpp"
#include "adaptifont/json_io.hpp"
#include "adaptifont/session/session.hpp"

namespace httplib {
class Server;
}

namespace adaptifont::service {

struct ServiceConfig {
  std::filesystem::path data_dir;  // empty: nothing persisted
  Json default_config = Json::object();  // session config template (texts, ...)
  std::shared_ptr<const fontspace::FontBasis> basis;
  std::uint64_t seed = 0;
  session::Clock clock = session::wall_clock_ms;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// {error: {code, message}} with the HTTP status for the code.
Response error_response(ErrorCode code, const std::string& message);
int http_status(ErrorCode code);

/// Session API independent of the transport. Sessions are serialized by a
/// per-session mutex; different sessions proceed concurrently.
class Api {
 public:
  explicit Api(ServiceConfig cfg);
  ~Api();

  /// Dispatches one request. `idempotency_key` may be empty.
  Response handle(const std::string& method, const std::string& path, const std::string& body,
                  const std::string& idempotency_key = {});

  /// Reloads every session log under data_dir; returns how many.
  int recover_sessions();

  /// Registers the routes on an httplib server.
  void bind(httplib::Server& server);

  std::size_t session_count() const;

 private:
  struct Entry;
  Response create_session(const std::string& body);
  Response with_session(const std::string& id, const std::function<Response(Entry&)>& fn);
  Json trial_payload(Entry& e, const session::Trial& t);
  std::filesystem::path log_path(const std::string& id) const;
  void write_snapshot(Entry& e);

  ServiceConfig cfg_;
  mutable std::shared_mutex registry_mutex_;
  std::map<std::string, std::unique_ptr<Entry>> sessions_;
  std::uint64_t counter_ = 0;
};

}  // namespace adaptifont::service
