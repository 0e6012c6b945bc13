#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace adaptifont::fontspace {

struct NmfOptions {
  int max_iter = 5000;
  double tol = 1e-6;  // relative change of the objective between iterations
  std::uint64_t seed = 0;
};

/// Binary observation mask for Wold-style block holdouts; 1 = observed.
struct HoldoutMask {
  Eigen::MatrixXd mask;
  std::vector<int> row_edges;  // 5 edges -> 4 block rows
  std::vector<int> col_edges;  // 5 edges -> 4 block columns
  std::vector<int> held_out_block;  // column-block index held out in each block row; a permutation

  Eigen::Index rows() const { return mask.rows(); }
  Eigen::Index cols() const { return mask.cols(); }
};

/// Equal index ranges, remainder absorbed by the last block.
std::vector<int> block_edges(int extent, int blocks);

/// Hides one randomly chosen block per block row of a 4x4 grid.
HoldoutMask make_wold_holdout(int rows, int cols, std::uint64_t seed);

/// X ~= coords * basis with both factors nonnegative.
struct Factorization {
  Eigen::MatrixXd coords;  // n x k
  Eigen::MatrixXd basis;   // k x D
  std::vector<double> objective;  // ||M .* (X - coords*basis)||_F after each iteration
  int iterations = 0;
  bool converged = false;
};

/// Multiplicative-update NMF on the (optionally masked) Frobenius objective.
/// Entries where the mask is zero never enter the computation.
Factorization nmf(const Eigen::MatrixXd& X, int k, const HoldoutMask* mask = nullptr,
                  const NmfOptions& opts = {});

/// ||(1 - M) .* (X - coords*basis)||_F
double held_out_error(const Eigen::MatrixXd& X, const Factorization& fit, const HoldoutMask& mask);

double relative_error(const Eigen::MatrixXd& X, const Factorization& fit);

}  // namespace adaptifont::fontspace
