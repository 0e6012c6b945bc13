#pragma once

#include <string>
#include <vector>

#include "adaptifont/json_io.hpp"

namespace adaptifont::session {

struct ReplayReport {
  int proposals_checked = 0;
  int observations = 0;
  std::vector<std::string> mismatches;
  /// Optimizer trace: {iter, proposed_c, wpm, params, phase, iv_before, iv_after}.
  std::vector<Json> trace;
  bool ok() const { return mismatches.empty() && proposals_checked > 0; }
};

/// Re-runs a fresh optimizer over the logged (coords, wpm) sequence and
/// compares each regenerated proposal with the logged one bit for bit.
ReplayReport replay_log(const std::vector<Json>& events);

}  // namespace adaptifont::session
