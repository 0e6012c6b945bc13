#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adaptifont/fontspace/atlas.hpp"

namespace adaptifont::fontspace {

struct GlyphSlot {
  char32_t character = 0;
  int span_start = 0;
  int span_end = 0;

  int width() const { return span_end - span_start; }
  bool operator==(const GlyphSlot&) const = default;
};

/// Shared description of how a font vector is laid out:
///   [0, H*W)                 raster pixels, row-major, scaled to [0,1]
///   H*W + 2g, H*W + 2g + 1   advance and left side bearing of glyph g,
///                            divided by `alignment_scale`
struct CorpusLayout {
  int height = 0;
  int width = 0;
  int point_size = 0;
  int baseline = 0;
  double units_per_em = 1000;
  double alignment_scale = 1000;
  std::vector<GlyphSlot> glyphs;

  std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }
  std::size_t dimension() const { return pixel_count() + 2 * glyphs.size(); }
  std::size_t advance_index(std::size_t glyph) const { return pixel_count() + 2 * glyph; }
  std::size_t lsb_index(std::size_t glyph) const { return pixel_count() + 2 * glyph + 1; }

  struct Entry {
    enum class Kind { kPixel, kAdvance, kLsb } kind;
    int row = -1;
    int col = -1;
    int glyph = -1;
  };
  /// Maps a vector index back to the pixel or alignment field it holds.
  Entry locate(std::size_t index) const;

  int glyph_index(char32_t ch) const;

  bool operator==(const CorpusLayout&) const = default;
};

struct FontVector {
  Eigen::VectorXd values;
  CorpusLayout layout;
};

struct CorpusMatrix {
  Eigen::MatrixXd X;  // fonts as rows
  CorpusLayout layout;
  std::vector<std::string> font_names;
};

/// Builds the shared layout: per-glyph spans are the hull of that glyph's spans
/// across the corpus, which must stay disjoint.
CorpusLayout corpus_layout(const std::vector<GlyphAtlas>& atlases, double alignment_scale);

FontVector font_vector(const GlyphAtlas& atlas, const CorpusLayout& layout);

/// alignment_scale <= 0 selects the corpus units-per-em.
CorpusMatrix assemble_matrix(const std::vector<GlyphAtlas>& atlases, double alignment_scale = 0);

Json layout_to_json(const CorpusLayout& layout);
CorpusLayout layout_from_json(const Json& doc);

}  // namespace adaptifont::fontspace
