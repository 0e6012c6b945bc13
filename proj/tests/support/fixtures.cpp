#include "fixtures.hpp"

#include "adaptifont/fontspace/layout.hpp"
#include "adaptifont/fontspace/synthetic_corpus.hpp"
#include "adaptifont/rng.hpp"

namespace adaptifont::testing {

Eigen::MatrixXd low_rank_matrix(int n, int d, int k, std::uint64_t seed) {
  Rng rng = make_rng({seed, 0x4c52});
  Eigen::MatrixXd a(n, k), b(k, d);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = uniform(rng, 0, 1);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = uniform(rng, 0, 1);
  return a * b;
}

Eigen::MatrixXd sparse_low_rank_matrix(int n, int d, int k, std::uint64_t seed) {
  Rng rng = make_rng({seed, 0x5350});
  auto draw = [&] { return uniform(rng, 0, 1) < 0.5 ? 0.0 : uniform(rng, 0, 1); };
  Eigen::MatrixXd a(n, k), b(k, d);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = draw();
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = draw();
  return a * b;
}

std::vector<analysis::LabeledPoint> blob_points(std::uint64_t seed, std::vector<int>* truth) {
  static const double centres[3][4] = {{0, 0, 0, 0}, {2, 2, 0, 1}, {0, 2, 2, 2}};
  Rng rng = make_rng({seed, 0x424c});
  std::vector<analysis::LabeledPoint> pts;
  if (truth) truth->clear();
  for (int b = 0; b < 3; ++b) {
    for (int i = 0; i < 50; ++i) {
      double v[4];
      for (int d = 0; d < 4; ++d) v[d] = centres[b][d] + 0.1 * standard_normal(rng);
      pts.push_back({fontgen::FontCoordinates(v[0], v[1], v[2]), v[3], static_cast<int>(pts.size())});
      if (truth) truth->push_back(b);
    }
  }
  return pts;
}

std::vector<analysis::LabeledPoint> noise_points(std::uint64_t seed, int n) {
  Rng rng = make_rng({seed, 0x4e4f});
  std::vector<analysis::LabeledPoint> pts;
  for (int i = 0; i < n; ++i) {
    const double a = uniform(rng, 0, 13), b = uniform(rng, 0, 13), c = uniform(rng, 0, 13);
    pts.push_back({fontgen::FontCoordinates(a, b, c), uniform(rng, 100, 300), i});
  }
  return pts;
}

namespace {

std::shared_ptr<const fontspace::FontBasis> learn(int n_fonts, int max_iter) {
  fontspace::SyntheticCorpusOptions opts;
  opts.n_fonts = n_fonts;
  const auto corpus = fontspace::assemble_matrix(fontspace::synthetic_corpus(opts));
  fontspace::LearnOptions lo;
  lo.nmf.max_iter = max_iter;
  lo.nmf.seed = 1;
  return std::make_shared<const fontspace::FontBasis>(fontspace::learn_font_space(corpus, lo));
}

}  // namespace

std::shared_ptr<const fontspace::FontBasis> small_basis() {
  static const auto basis = learn(6, 150);
  return basis;
}

std::shared_ptr<const fontspace::FontBasis> corpus_basis() {
  static const auto basis = learn(25, 5000);
  return basis;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(ADAPTIFONT_TEST_SCRATCH) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace adaptifont::testing
