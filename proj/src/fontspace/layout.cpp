#include "adaptifont/fontspace/layout.hpp"

#include <algorithm>
#include <cmath>

#include "adaptifont/error.hpp"
#include "adaptifont/utf8.hpp"

namespace adaptifont::fontspace {

CorpusLayout::Entry CorpusLayout::locate(std::size_t index) const {
  if (index >= dimension()) throw Error(ErrorCode::kOutOfRange, "vector index outside layout");
  Entry e{};
  if (index < pixel_count()) {
    e.kind = Entry::Kind::kPixel;
    e.row = static_cast<int>(index / width);
    e.col = static_cast<int>(index % width);
    return e;
  }
  const std::size_t rel = index - pixel_count();
  e.glyph = static_cast<int>(rel / 2);
  e.kind = rel % 2 == 0 ? Entry::Kind::kAdvance : Entry::Kind::kLsb;
  return e;
}

int CorpusLayout::glyph_index(char32_t ch) const {
  for (std::size_t i = 0; i < glyphs.size(); ++i) {
    if (glyphs[i].character == ch) return static_cast<int>(i);
  }
  return -1;
}

CorpusLayout corpus_layout(const std::vector<GlyphAtlas>& atlases, double alignment_scale) {
  if (atlases.size() < 2) throw Error(ErrorCode::kInconsistentCorpus, "a corpus needs at least two atlases");
  const GlyphAtlas& first = atlases.front();
  CorpusLayout layout;
  layout.height = first.image.height;
  layout.width = first.image.width;
  layout.point_size = first.point_size;
  layout.units_per_em = first.units_per_em;
  layout.baseline = first.baseline.value_or(static_cast<int>(std::lround(0.8 * first.image.height)));
  for (const auto& g : first.glyphs) layout.glyphs.push_back({g.character, g.span_start, g.span_end});

  bool shared_upm = true;
  for (const auto& atlas : atlases) {
    validate_atlas(atlas);
    if (atlas.image.height != layout.height || atlas.image.width != layout.width) {
      throw Error(ErrorCode::kInconsistentCorpus, "raster size differs in " + atlas.font_name);
    }
    if (atlas.glyphs.size() != layout.glyphs.size()) {
      throw Error(ErrorCode::kInconsistentCorpus, "glyph count differs in " + atlas.font_name);
    }
    shared_upm = shared_upm && atlas.units_per_em == layout.units_per_em;
    for (std::size_t g = 0; g < layout.glyphs.size(); ++g) {
      auto& slot = layout.glyphs[g];
      const auto& entry = atlas.glyphs[g];
      if (entry.character != slot.character) {
        throw Error(ErrorCode::kInconsistentCorpus,
                    "glyph order differs in " + atlas.font_name + " at '" + encode_utf8(entry.character) + "'");
      }
      slot.span_start = std::min(slot.span_start, entry.span_start);
      slot.span_end = std::max(slot.span_end, entry.span_end);
    }
  }
  for (std::size_t g = 1; g < layout.glyphs.size(); ++g) {
    if (layout.glyphs[g].span_start < layout.glyphs[g - 1].span_end) {
      throw Error(ErrorCode::kInconsistentCorpus,
                  "span overlap across corpus at '" + encode_utf8(layout.glyphs[g].character) + "'");
    }
  }
  if (alignment_scale <= 0) {
    if (!shared_upm) {
      throw Error(ErrorCode::kInconsistentCorpus, "units_per_em differs across corpus; pass an explicit alignment scale");
    }
    alignment_scale = layout.units_per_em;
  }
  layout.alignment_scale = alignment_scale;
  return layout;
}

FontVector font_vector(const GlyphAtlas& atlas, const CorpusLayout& layout) {
  if (atlas.image.height != layout.height || atlas.image.width != layout.width ||
      atlas.glyphs.size() != layout.glyphs.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "atlas does not match corpus layout: " + atlas.font_name);
  }
  FontVector v{Eigen::VectorXd(static_cast<Eigen::Index>(layout.dimension())), layout};
  const std::size_t np = layout.pixel_count();
  for (std::size_t i = 0; i < np; ++i) v.values[static_cast<Eigen::Index>(i)] = atlas.image.pixels[i] / 255.0;
  for (std::size_t g = 0; g < layout.glyphs.size(); ++g) {
    v.values[static_cast<Eigen::Index>(layout.advance_index(g))] = atlas.glyphs[g].advance / layout.alignment_scale;
    v.values[static_cast<Eigen::Index>(layout.lsb_index(g))] = atlas.glyphs[g].lsb / layout.alignment_scale;
  }
  return v;
}

CorpusMatrix assemble_matrix(const std::vector<GlyphAtlas>& atlases, double alignment_scale) {
  CorpusMatrix out;
  out.layout = corpus_layout(atlases, alignment_scale);
  const auto n = static_cast<Eigen::Index>(atlases.size());
  out.X.resize(n, static_cast<Eigen::Index>(out.layout.dimension()));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.X.row(i) = font_vector(atlases[static_cast<std::size_t>(i)], out.layout).values.transpose();
    out.font_names.push_back(atlases[static_cast<std::size_t>(i)].font_name);
  }
  return out;
}

Json layout_to_json(const CorpusLayout& layout) {
  Json glyphs = Json::array();
  for (const auto& g : layout.glyphs) {
    glyphs.push_back({{"char", encode_utf8(g.character)}, {"span", {g.span_start, g.span_end}}});
  }
  return {{"height", layout.height},
          {"width", layout.width},
          {"point_size", layout.point_size},
          {"baseline", layout.baseline},
          {"units_per_em", layout.units_per_em},
          {"alignment_scale", layout.alignment_scale},
          {"glyphs", glyphs}};
}

CorpusLayout layout_from_json(const Json& doc) {
  CorpusLayout layout;
  try {
    layout.height = doc.at("height").get<int>();
    layout.width = doc.at("width").get<int>();
    layout.point_size = doc.at("point_size").get<int>();
    layout.baseline = doc.at("baseline").get<int>();
    layout.units_per_em = doc.at("units_per_em").get<double>();
    layout.alignment_scale = doc.at("alignment_scale").get<double>();
    for (const auto& g : doc.at("glyphs")) {
      layout.glyphs.push_back({single_code_point(g.at("char").get<std::string>()), g.at("span")[0].get<int>(),
                               g.at("span")[1].get<int>()});
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, std::string("layout: ") + e.what());
  }
  return layout;
}

}  // namespace adaptifont::fontspace
