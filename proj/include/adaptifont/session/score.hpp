#pragma once

#include <optional>

namespace adaptifont::session {

struct ScoreWeights {
  double detection_weight = 0.5;  // score multiplier spans [1 - w, 1]
  double mc_correct = 1.1;
  double mc_wrong = 0.9;
};

double words_per_minute(int words, double duration_ms);

/// 1 - min(1, |presses - expected| / max(1, expected)).
double detection_accuracy(int presses, int expected);

/// round(wpm * (1 - w + w * accuracy) * mc_factor).
long compute_score(double wpm, int presses, int expected, std::optional<bool> mc_correct,
                   const ScoreWeights& weights = {});

}  // namespace adaptifont::session
