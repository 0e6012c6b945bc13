#include "adaptifont/session/score.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "adaptifont/error.hpp"

namespace adaptifont::session {

double words_per_minute(int words, double duration_ms) {
  if (!(duration_ms > 0)) throw Error(ErrorCode::kInvalidArgument, "duration_ms must be positive");
  if (words < 0) throw Error(ErrorCode::kInvalidArgument, "negative word count");
  return words / (duration_ms / 60000.0);
}

double detection_accuracy(int presses, int expected) {
  if (expected < 0 || presses < 0) throw Error(ErrorCode::kInvalidArgument, "counts must be nonnegative");
  const double miss = std::abs(presses - expected) / static_cast<double>(std::max(1, expected));
  return 1.0 - std::min(1.0, miss);
}

long compute_score(double wpm, int presses, int expected, std::optional<bool> mc_correct, const ScoreWeights& w) {
  const double acc = detection_accuracy(presses, expected);
  double factor = 1.0;
  if (mc_correct) factor = *mc_correct ? w.mc_correct : w.mc_wrong;
  return std::lround(wpm * (1.0 - w.detection_weight + w.detection_weight * acc) * factor);
}

}  // namespace adaptifont::session
