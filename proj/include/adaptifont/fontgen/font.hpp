#pragma once

#include <string>
#include <vector>

#include "adaptifont/fontgen/coordinates.hpp"
#include "adaptifont/fontgen/raster.hpp"
#include "adaptifont/fontgen/trace.hpp"
#include "adaptifont/fontspace/basis.hpp"

namespace adaptifont::fontgen {

struct GlyphMetrics {
  double advance = 0;  // font units
  double lsb = 0;      // font units
};

/// Result of evaluating coords*basis: the unclamped linear vector plus its
/// split into a clamped raster and per-glyph metrics.
struct SynthesizedVector {
  fontspace::FontVector linear;
  Raster raster;
  std::vector<GlyphMetrics> metrics;
};

SynthesizedVector synthesize_vector(const FontCoordinates& c, const fontspace::FontBasis& basis);

struct GlyphOutline {
  char32_t character = 0;
  std::vector<Contour> contours;  // font units, y-up, baseline at y = 0
  double advance_width = 0;
  double left_side_bearing = 0;
};

struct SynthFont {
  std::string name;
  double units_per_em = 1000;
  double ascent = 800;    // font units above the baseline covered by the raster
  double descent = -200;  // negative, below the baseline
  std::vector<GlyphOutline> outlines;
  FontCoordinates source_coords;
  bool forced = false;  // built outside the feasible region on request
};

struct BuildOptions {
  double threshold = 0.5;
  TraceOptions trace;
  bool force = false;
  FeasibleRegion region;
  std::string name;  // empty: derived from the coordinates
};

/// Glyph g's mask at the given threshold, from an already synthesized vector.
Bitmask glyph_mask(const SynthesizedVector& v, std::size_t glyph, double threshold);

/// Pixel-frame contour -> font units for glyph cell starting at `span_start`.
Point2 pixel_to_font_units(const Point2& p, const fontspace::CorpusLayout& layout);

/// synthesize -> split per glyph -> binarize -> trace -> attach metrics.
/// Throws Error(kInfeasible) for coordinates outside the region unless forced.
SynthFont build_font(const FontCoordinates& c, const fontspace::FontBasis& basis, const BuildOptions& opts = {});

}  // namespace adaptifont::fontgen
