#include "adaptifont/fontspace/nmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adaptifont/error.hpp"
#include "adaptifont/rng.hpp"

namespace adaptifont::fontspace {

namespace {

constexpr double kDenominatorFloor = 1e-16;
constexpr int kGridBlocks = 4;

void check_input(const Eigen::MatrixXd& X, int k, const HoldoutMask* mask) {
  if (X.rows() == 0 || X.cols() == 0) throw Error(ErrorCode::kInvalidArgument, "empty matrix");
  if (k < 1 || k > std::min(X.rows(), X.cols())) {
    throw Error(ErrorCode::kOutOfRange, "k=" + std::to_string(k) + " outside [1, min(n, D)]");
  }
  if (mask && (mask->rows() != X.rows() || mask->cols() != X.cols())) {
    throw Error(ErrorCode::kDimensionMismatch, "mask shape differs from X");
  }
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      if (mask && (*mask).mask(i, j) == 0.0) continue;
      const double x = X(i, j);
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw Error(ErrorCode::kInvalidArgument, "X has a negative or non-finite entry");
      }
    }
  }
}

bool converged(double prev, double cur, double tol, double scale) {
  if (cur <= 1e-13 * scale) return true;
  if (!std::isfinite(prev)) return false;
  return std::abs(prev - cur) <= tol * std::max(prev, std::numeric_limits<double>::min());
}

}  // namespace

std::vector<int> block_edges(int extent, int blocks) {
  std::vector<int> edges(static_cast<std::size_t>(blocks) + 1);
  const int step = extent / blocks;
  for (int b = 0; b < blocks; ++b) edges[static_cast<std::size_t>(b)] = b * step;
  edges.back() = extent;
  return edges;
}

HoldoutMask make_wold_holdout(int rows, int cols, std::uint64_t seed) {
  if (rows < kGridBlocks || cols < kGridBlocks) {
    throw Error(ErrorCode::kInvalidArgument, "matrix too small for a 4x4 block partition");
  }
  HoldoutMask h;
  h.mask = Eigen::MatrixXd::Ones(rows, cols);
  h.row_edges = block_edges(rows, kGridBlocks);
  h.col_edges = block_edges(cols, kGridBlocks);
  // a random permutation: one block per block-row and per block-column
  Rng rng = make_rng({seed, 0x574f4c44});
  std::vector<int> perm(kGridBlocks);
  for (int i = 0; i < kGridBlocks; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (int i = kGridBlocks; i > 1; --i) {
    std::swap(perm[static_cast<std::size_t>(i - 1)], perm[uniform_index(rng, static_cast<std::uint64_t>(i))]);
  }
  for (int br = 0; br < kGridBlocks; ++br) {
    const int bc = perm[static_cast<std::size_t>(br)];
    h.held_out_block.push_back(bc);
    const int r0 = h.row_edges[static_cast<std::size_t>(br)];
    const int r1 = h.row_edges[static_cast<std::size_t>(br) + 1];
    const int c0 = h.col_edges[static_cast<std::size_t>(bc)];
    const int c1 = h.col_edges[static_cast<std::size_t>(bc) + 1];
    h.mask.block(r0, c0, r1 - r0, c1 - c0).setZero();
  }
  return h;
}

Factorization nmf(const Eigen::MatrixXd& X, int k, const HoldoutMask* mask, const NmfOptions& opts) {
  check_input(X, k, mask);
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();

  Factorization f;
  f.coords.resize(n, k);
  f.basis.resize(k, d);
  Rng rng = make_rng({opts.seed, 0x4e4d46});
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < k; ++j) f.coords(i, j) = uniform(rng, 0.1, 1.0);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < d; ++j) f.basis(i, j) = uniform(rng, 0.1, 1.0);

  Eigen::MatrixXd& W = f.coords;
  Eigen::MatrixXd& H = f.basis;
  double prev = std::numeric_limits<double>::infinity();

  if (!mask) {
    const double scale = X.norm();
    const double x2 = X.squaredNorm();
    for (int it = 1; it <= opts.max_iter; ++it) {
      const Eigen::MatrixXd WtX = W.transpose() * X;
      const Eigen::MatrixXd WtW = W.transpose() * W;
      H.array() *= WtX.array() / ((WtW * H).array() + kDenominatorFloor);
      const Eigen::MatrixXd XHt = X * H.transpose();
      const Eigen::MatrixXd HHt = H * H.transpose();
      W.array() *= XHt.array() / ((W * HHt).array() + kDenominatorFloor);
      // ||X - WH||^2 = ||X||^2 - 2<W, XH'> + <W'W, HH'>; the direct residual
      // is only needed once cancellation would dominate.
      const double r2 = x2 - 2.0 * (W.array() * XHt.array()).sum() +
                        ((W.transpose() * W).array() * HHt.array()).sum();
      const double obj = r2 > 1e-6 * x2 ? std::sqrt(r2) : (X - W * H).norm();
      f.objective.push_back(obj);
      f.iterations = it;
      if (converged(prev, obj, opts.tol, scale)) {
        f.converged = true;
        break;
      }
      prev = obj;
    }
    return f;
  }

  // Held-out entries are replaced by zeros before anything else touches X, so
  // their values cannot leak into the fit.
  const Eigen::ArrayXXd M = mask->mask.array();
  const Eigen::MatrixXd Xm = (M > 0.0).select(X.array(), 0.0).matrix();
  const double scale = Xm.norm();
  for (int it = 1; it <= opts.max_iter; ++it) {
    Eigen::MatrixXd R = (M * (W * H).array()).matrix();
    H.array() *= (W.transpose() * Xm).array() / ((W.transpose() * R).array() + kDenominatorFloor);
    R = (M * (W * H).array()).matrix();
    W.array() *= (Xm * H.transpose()).array() / ((R * H.transpose()).array() + kDenominatorFloor);
    const double obj = (Xm.array() - M * (W * H).array()).matrix().norm();
    f.objective.push_back(obj);
    f.iterations = it;
    if (converged(prev, obj, opts.tol, scale)) {
      f.converged = true;
      break;
    }
    prev = obj;
  }
  return f;
}

double held_out_error(const Eigen::MatrixXd& X, const Factorization& fit, const HoldoutMask& mask) {
  if (mask.rows() != X.rows() || mask.cols() != X.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "mask shape differs from X");
  }
  const Eigen::ArrayXXd residual = (X - fit.coords * fit.basis).array();
  return std::sqrt(((1.0 - mask.mask.array()) * residual.square()).sum());
}

double relative_error(const Eigen::MatrixXd& X, const Factorization& fit) {
  const double denom = X.norm();
  const double num = (X - fit.coords * fit.basis).norm();
  return denom > 0 ? num / denom : num;
}

}  // namespace adaptifont::fontspace
