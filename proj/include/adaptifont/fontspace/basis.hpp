#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adaptifont/fontspace/layout.hpp"
#include "adaptifont/fontspace/nmf.hpp"
#include "adaptifont/json_io.hpp"

namespace adaptifont::fontspace {

/// A learned font space: generative components as rows of `basis`,
/// per-font coordinates as rows of `coords`.
struct FontBasis {
  Eigen::MatrixXd basis;   // k x D
  Eigen::MatrixXd coords;  // n_fonts x k
  CorpusLayout layout;
  std::vector<std::string> font_names;

  int k() const { return static_cast<int>(basis.rows()); }
  Eigen::Index dimension() const { return basis.cols(); }
};

struct LearnOptions {
  int k = 3;
  NmfOptions nmf;
  /// Mean coordinate of the training fonts along every component after
  /// rescaling; <= 0 keeps the raw factor scale.
  double coordinate_mean = 4.5;
};

/// Rescales each component so the training coordinates average
/// `coordinate_mean`; the product coords*basis is unchanged.
void normalize_scale(FontBasis& basis, double coordinate_mean);

FontBasis learn_font_space(const CorpusMatrix& corpus, const LearnOptions& opts = {});

struct Encoding {
  Eigen::VectorXd coords;
  double residual = 0;  // ||v - coords*basis||_2
};

/// Nonnegative least squares placement of a font vector in the space.
Encoding encode_font(const Eigen::VectorXd& v, const FontBasis& basis);

/// Lawson-Hanson active set NNLS on the normal equations G c = h.
Eigen::VectorXd nnls_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs);

Json basis_to_json(const FontBasis& basis);
FontBasis basis_from_json(const Json& doc);
void save_basis(const std::filesystem::path& path, const FontBasis& basis);
FontBasis load_basis(const std::filesystem::path& path);

}  // namespace adaptifont::fontspace
