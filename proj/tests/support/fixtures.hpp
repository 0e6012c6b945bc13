#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "adaptifont/analysis/report.hpp"
#include "adaptifont/fontspace/basis.hpp"
#include "adaptifont/session/corpus.hpp"

namespace adaptifont::testing {

/// Product of two seeded uniform(0,1) nonnegative factors, n x k and k x d.
Eigen::MatrixXd low_rank_matrix(int n, int d, int k, std::uint64_t seed);

/// As low_rank_matrix, but each factor entry is zero with probability 1/2,
/// like ink on a blank glyph cell.
Eigen::MatrixXd sparse_low_rank_matrix(int n, int d, int k, std::uint64_t seed);

/// Basis learned from a small synthetic atlas corpus; built once per process.
std::shared_ptr<const fontspace::FontBasis> small_basis();

/// Basis learned from the full 25-font synthetic corpus; built once per process.
std::shared_ptr<const fontspace::FontBasis> corpus_basis();

/// Three Gaussian blobs (sd 0.1, 50 points each) in (c, wpm) space with
/// centres at least 3 apart; `truth` receives the blob of each point.
std::vector<analysis::LabeledPoint> blob_points(std::uint64_t seed, std::vector<int>* truth = nullptr);

/// n points uniform in [0, 13]^3 x [100, 300].
std::vector<analysis::LabeledPoint> noise_points(std::uint64_t seed, int n = 30);

/// Fresh empty directory under the build tree.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace adaptifont::testing
