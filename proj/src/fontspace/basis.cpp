#include "adaptifont/fontspace/basis.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "adaptifont/error.hpp"

namespace adaptifont::fontspace {

void normalize_scale(FontBasis& fb, double coordinate_mean) {
  if (coordinate_mean <= 0) return;
  for (Eigen::Index j = 0; j < fb.coords.cols(); ++j) {
    const double m = fb.coords.col(j).mean();
    if (!(m > 0)) continue;
    const double s = coordinate_mean / m;
    fb.coords.col(j) *= s;
    fb.basis.row(j) /= s;
  }
}

FontBasis learn_font_space(const CorpusMatrix& corpus, const LearnOptions& opts) {
  Factorization fit = nmf(corpus.X, opts.k, nullptr, opts.nmf);
  FontBasis fb{std::move(fit.basis), std::move(fit.coords), corpus.layout, corpus.font_names};
  normalize_scale(fb, opts.coordinate_mean);
  return fb;
}

Eigen::VectorXd nnls_gram(const Eigen::MatrixXd& G, const Eigen::VectorXd& h) {
  const Eigen::Index k = G.rows();
  if (G.cols() != k || h.size() != k) throw Error(ErrorCode::kDimensionMismatch, "nnls: shape mismatch");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(k);
  std::vector<bool> passive(static_cast<std::size_t>(k), false);
  const double tol = 1e-13 * std::max(1.0, G.cwiseAbs().maxCoeff()) * std::max(1.0, h.cwiseAbs().maxCoeff());

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < k; ++i)
      if (passive[static_cast<std::size_t>(i)]) idx.push_back(i);
    const auto m = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd Gp(m, m);
    Eigen::VectorXd hp(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      hp[a] = h[idx[static_cast<std::size_t>(a)]];
      for (Eigen::Index b = 0; b < m; ++b) Gp(a, b) = G(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    }
    const Eigen::VectorXd zp = Gp.ldlt().solve(hp);
    z.setZero(k);
    for (Eigen::Index a = 0; a < m; ++a) z[idx[static_cast<std::size_t>(a)]] = zp[a];
  };

  const int max_outer = static_cast<int>(3 * k + 10);
  for (int outer = 0; outer < max_outer; ++outer) {
    const Eigen::VectorXd w = h - G * x;
    Eigen::Index t = -1;
    double best = tol;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (!passive[static_cast<std::size_t>(i)] && w[i] > best) {
        best = w[i];
        t = i;
      }
    }
    if (t < 0) break;
    passive[static_cast<std::size_t>(t)] = true;

    Eigen::VectorXd z;
    for (int inner = 0; inner < 10 * k + 10; ++inner) {
      solve_passive(z);
      bool all_positive = true;
      for (Eigen::Index i = 0; i < k; ++i)
        if (passive[static_cast<std::size_t>(i)] && z[i] <= 0) all_positive = false;
      if (all_positive) break;
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < k; ++i) {
        if (passive[static_cast<std::size_t>(i)] && z[i] <= 0) alpha = std::min(alpha, x[i] / (x[i] - z[i]));
      }
      x += alpha * (z - x);
      for (Eigen::Index i = 0; i < k; ++i) {
        if (passive[static_cast<std::size_t>(i)] && x[i] <= 1e-15) {
          passive[static_cast<std::size_t>(i)] = false;
          x[i] = 0;
        }
      }
    }
    x = z;
    for (Eigen::Index i = 0; i < k; ++i)
      if (!passive[static_cast<std::size_t>(i)]) x[i] = 0;
  }
  return x.cwiseMax(0.0);
}

Encoding encode_font(const Eigen::VectorXd& v, const FontBasis& fb) {
  if (v.size() != fb.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "font vector length " + std::to_string(v.size()) + " != basis dimension " + std::to_string(fb.dimension()));
  }
  const Eigen::MatrixXd G = fb.basis * fb.basis.transpose();
  const Eigen::VectorXd h = fb.basis * v;
  Encoding e;
  e.coords = nnls_gram(G, h);
  e.residual = (v - fb.basis.transpose() * e.coords).norm();
  return e;
}

Json basis_to_json(const FontBasis& fb) {
  std::vector<double> flat(static_cast<std::size_t>(fb.basis.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(flat.data(), fb.basis.rows(),
                                                                                     fb.basis.cols()) = fb.basis;
  Json coords = Json::array();
  for (Eigen::Index i = 0; i < fb.coords.rows(); ++i) {
    std::vector<double> row;
    for (Eigen::Index j = 0; j < fb.coords.cols(); ++j) row.push_back(fb.coords(i, j));
    coords.push_back(row);
  }
  return {{"k", fb.k()},
          {"D", fb.dimension()},
          {"layout", layout_to_json(fb.layout)},
          {"basis", flat},
          {"coords", coords},
          {"corpus_font_names", fb.font_names}};
}

FontBasis basis_from_json(const Json& doc) {
  FontBasis fb;
  try {
    const int k = doc.at("k").get<int>();
    const auto d = doc.at("D").get<Eigen::Index>();
    fb.layout = layout_from_json(doc.at("layout"));
    if (static_cast<Eigen::Index>(fb.layout.dimension()) != d) {
      throw Error(ErrorCode::kDimensionMismatch, "basis D does not match its layout");
    }
    const auto flat = doc.at("basis").get<std::vector<double>>();
    if (flat.size() != static_cast<std::size_t>(k) * static_cast<std::size_t>(d)) {
      throw Error(ErrorCode::kDimensionMismatch, "basis has " + std::to_string(flat.size()) + " values, expected k*D");
    }
    fb.basis = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(flat.data(), k, d);
    const auto& coords = doc.at("coords");
    fb.coords.resize(static_cast<Eigen::Index>(coords.size()), k);
    for (std::size_t i = 0; i < coords.size(); ++i) {
      const auto row = coords[i].get<std::vector<double>>();
      if (row.size() != static_cast<std::size_t>(k)) throw Error(ErrorCode::kDimensionMismatch, "coords row length != k");
      for (int j = 0; j < k; ++j) fb.coords(static_cast<Eigen::Index>(i), j) = row[static_cast<std::size_t>(j)];
    }
    fb.font_names = doc.at("corpus_font_names").get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, std::string("basis: ") + e.what());
  }
  if ((fb.basis.array() < 0).any() || (fb.coords.array() < 0).any()) {
    throw Error(ErrorCode::kMalformedInput, "basis contains negative entries");
  }
  return fb;
}

void save_basis(const std::filesystem::path& path, const FontBasis& fb) { write_json_file(path, basis_to_json(fb)); }

FontBasis load_basis(const std::filesystem::path& path) { return basis_from_json(read_json_file(path)); }

}  // namespace adaptifont::fontspace
