#include "adaptifont/fontgen/font.hpp"

#include <algorithm>
#include <cmath>

#include "adaptifont/error.hpp"

namespace adaptifont::fontgen {

using fontspace::CorpusLayout;
using fontspace::FontBasis;

SynthesizedVector synthesize_vector(const FontCoordinates& c, const FontBasis& basis) {
  if (basis.k() != 3) throw Error(ErrorCode::kDimensionMismatch, "font synthesis needs a 3-component basis");
  if (static_cast<std::size_t>(basis.dimension()) != basis.layout.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, "basis dimension does not match its layout");
  }
  for (int i = 0; i < 3; ++i) {
    if (!(c[i] >= 0.0) || !std::isfinite(c[i])) throw Error(ErrorCode::kInvalidArgument, "coordinates must be finite and >= 0");
  }
  const CorpusLayout& layout = basis.layout;
  SynthesizedVector out;
  out.linear.layout = layout;
  out.linear.values = basis.basis.transpose() * c.value;

  out.raster.height = layout.height;
  out.raster.width = layout.width;
  out.raster.values.resize(layout.pixel_count());
  for (std::size_t i = 0; i < layout.pixel_count(); ++i) {
    out.raster.values[i] = std::clamp(out.linear.values[static_cast<Eigen::Index>(i)], 0.0, 1.0);
  }
  out.metrics.resize(layout.glyphs.size());
  for (std::size_t g = 0; g < layout.glyphs.size(); ++g) {
    out.metrics[g].advance = out.linear.values[static_cast<Eigen::Index>(layout.advance_index(g))] * layout.alignment_scale;
    out.metrics[g].lsb = out.linear.values[static_cast<Eigen::Index>(layout.lsb_index(g))] * layout.alignment_scale;
  }
  return out;
}

Bitmask glyph_mask(const SynthesizedVector& v, std::size_t glyph, double threshold) {
  const auto& slot = v.linear.layout.glyphs.at(glyph);
  return binarize(crop_columns(v.raster, slot.span_start, slot.span_end), threshold);
}

Point2 pixel_to_font_units(const Point2& p, const CorpusLayout& layout) {
  const double s = layout.units_per_em / layout.point_size;
  return {p.x * s, (p.y - (layout.height - layout.baseline)) * s};
}

SynthFont build_font(const FontCoordinates& c, const FontBasis& basis, const BuildOptions& opts) {
  const bool feasible = opts.region.contains(c);
  if (!feasible && !opts.force) {
    throw Error(ErrorCode::kInfeasible, "coordinates " + format_coordinates(c) + " outside the feasible region");
  }
  const SynthesizedVector v = synthesize_vector(c, basis);
  const CorpusLayout& layout = basis.layout;
  const double s = layout.units_per_em / layout.point_size;

  SynthFont font;
  font.name = opts.name.empty() ? "AdaptiFont " + format_coordinates(c) : opts.name;
  font.units_per_em = layout.units_per_em;
  font.ascent = layout.baseline * s;
  font.descent = -(layout.height - layout.baseline) * s;
  font.source_coords = c;
  font.forced = !feasible;
  font.outlines.reserve(layout.glyphs.size());
  for (std::size_t g = 0; g < layout.glyphs.size(); ++g) {
    GlyphOutline outline;
    outline.character = layout.glyphs[g].character;
    outline.advance_width = v.metrics[g].advance;
    outline.left_side_bearing = v.metrics[g].lsb;
    for (auto& contour : trace_glyph(glyph_mask(v, g, opts.threshold), opts.trace)) {
      for (auto& p : contour) p = pixel_to_font_units(p, layout);
      outline.contours.push_back(std::move(contour));
    }
    font.outlines.push_back(std::move(outline));
  }
  return font;
}

}  // namespace adaptifont::fontgen
