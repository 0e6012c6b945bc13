#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adaptifont/fontspace/atlas.hpp"

namespace adaptifont::fontspace {

/// Style knobs of the procedural stroke renderer used to produce atlas
/// corpora when no licensed font files are at hand.
struct StrokeStyle {
  std::string name;
  double weight = 1.8;       // stroke half-width, px
  double width = 20.0;       // glyph box width, px
  double slant = 0.0;        // horizontal shear per px of height
  double serif = 0.0;        // serif half-length, px (0 = sans)
  double x_height = 0.62;    // lowercase height relative to cap height
  double contrast = 0.0;     // 0..1, thins horizontal strokes
};

struct SyntheticCorpusOptions {
  int n_fonts = 25;
  int height = 51;
  int cell_width = 40;
  int width = 2375;
  int baseline = 42;
  int cap_height = 30;
  int point_size = 40;
  double units_per_em = 1000;
  std::uint64_t seed = 1;
};

/// The 59-glyph inventory of the synthetic corpus: A-Z, a-z and . , - : ; ! ?
std::u32string synthetic_glyph_set();

GlyphAtlas render_atlas(const StrokeStyle& style, const SyntheticCorpusOptions& opts);

std::vector<StrokeStyle> sample_styles(const SyntheticCorpusOptions& opts);

std::vector<GlyphAtlas> synthetic_corpus(const SyntheticCorpusOptions& opts = {});

}  // namespace adaptifont::fontspace
