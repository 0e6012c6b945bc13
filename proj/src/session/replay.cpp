#include "adaptifont/session/replay.hpp"

#include "adaptifont/error.hpp"
#include "adaptifont/optimizer/bayes_optimizer.hpp"
#include "adaptifont/session/session.hpp"

namespace adaptifont::session {

namespace {

fontgen::FontCoordinates coords_from(const Json& j) {
  return fontgen::FontCoordinates(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

}  // namespace

ReplayReport replay_log(const std::vector<Json>& events) {
  if (events.empty() || events.front().value("event", "") != "start")
    throw Error(ErrorCode::kMalformedInput, "log does not begin with a start event");
  ReplayReport rep;
  try {
    const Json& cfg_doc = events.front().at("payload").at("config");
    auto cfg = optimizer::optimizer_config_from_json(cfg_doc.at("optimizer"));
    cfg.acquisition.seed = cfg_doc.at("seed").get<std::uint64_t>();
    optimizer::BayesOptimizer opt(cfg);
    Json pending;
    for (std::size_t i = 1; i < events.size(); ++i) {
      const std::string kind = events[i].at("event").get<std::string>();
      const Json& p = events[i].at("payload");
      if (kind == "propose") {
        const auto prop = opt.propose();
        ++rep.proposals_checked;
        const auto logged = coords_from(p.at("coords"));
        const long tid = p.at("trial_id").get<long>();
        if (!(prop.c == logged) || prop.call != p.at("call").get<long>() ||
            optimizer::to_string(prop.phase) != p.at("phase").get<std::string>()) {
          rep.mismatches.push_back("trial " + std::to_string(tid) + ": replayed " +
                                   fontgen::format_coordinates(prop.c) + ", logged " +
                                   fontgen::format_coordinates(logged));
        }
        pending = {{"iter", prop.call}, {"proposed_c", p.at("coords")}, {"phase", p.at("phase")}};
      } else if (kind == "result" || kind == "reset") {
        const double wpm = p.at("wpm").get<double>();
        const auto outcome = opt.record({coords_from(p.at("coords")), wpm});
        ++rep.observations;
        Json rec = pending.is_null() ? Json::object() : pending;
        rec["wpm"] = wpm;
        rec["params"] = optimizer::kernel_params_to_json(opt.state().params());
        rec["iv_before"] = outcome.iv_before;
        rec["iv_after"] = outcome.iv_after;
        rep.trace.push_back(std::move(rec));
        pending = nullptr;
      }
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, std::string("log: ") + e.what());
  }
  return rep;
}

}  // namespace adaptifont::session
