#include "adaptifont/fontspace/atlas.hpp"

#include <algorithm>
#include <cctype>

#include "adaptifont/error.hpp"
#include "adaptifont/utf8.hpp"

namespace adaptifont::fontspace {

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_token(const std::string& bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const char c = bytes[pos];
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos])) && bytes[pos] != '#') ++pos;
  if (start == pos) throw Error(ErrorCode::kMalformedInput, "malformed PGM header: truncated");
  return bytes.substr(start, pos - start);
}

int header_int(const std::string& bytes, std::size_t& pos, const char* what) {
  const std::string tok = next_token(bytes, pos);
  if (!std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
      tok.size() > 9) {
    throw Error(ErrorCode::kMalformedInput, std::string("malformed PGM header: bad ") + what);
  }
  return std::stoi(tok);
}

}  // namespace

GrayImage parse_pgm(const std::string& bytes) {
  std::size_t pos = 0;
  if (next_token(bytes, pos) != "P5") throw Error(ErrorCode::kMalformedInput, "malformed PGM header: expected P5");
  GrayImage img;
  img.width = header_int(bytes, pos, "width");
  img.height = header_int(bytes, pos, "height");
  const int maxval = header_int(bytes, pos, "maxval");
  if (img.width <= 0 || img.height <= 0) throw Error(ErrorCode::kMalformedInput, "malformed PGM header: empty image");
  if (maxval != 255) throw Error(ErrorCode::kMalformedInput, "malformed PGM header: maxval must be 255");
  // exactly one whitespace byte separates the header from the raster
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw Error(ErrorCode::kMalformedInput, "malformed PGM header: missing raster");
  }
  ++pos;
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  if (bytes.size() - pos < count) throw Error(ErrorCode::kMalformedInput, "PGM raster truncated");
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                    bytes.begin() + static_cast<std::ptrdiff_t>(pos + count));
  return img;
}

GrayImage read_pgm(const std::filesystem::path& path) { return parse_pgm(read_text_file(path)); }

std::string encode_pgm(const GrayImage& image) {
  std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(image.pixels.begin(), image.pixels.end());
  return out;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  write_text_file(path, encode_pgm(image));
}

void validate_atlas(const GlyphAtlas& atlas) {
  const auto& img = atlas.image;
  if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height) {
    throw Error(ErrorCode::kMalformedInput, "raster size does not match header");
  }
  if (atlas.point_size <= 0) throw Error(ErrorCode::kMalformedInput, "point_size must be positive");
  if (!(atlas.units_per_em > 0)) throw Error(ErrorCode::kMalformedInput, "units_per_em must be positive");
  if (atlas.glyphs.empty()) throw Error(ErrorCode::kMalformedInput, "atlas has no glyphs");
  if (atlas.baseline && (*atlas.baseline < 0 || *atlas.baseline > img.height)) {
    throw Error(ErrorCode::kOutOfRange, "baseline outside the raster");
  }
  int prev_end = 0;
  for (const auto& g : atlas.glyphs) {
    if (g.span_start < 0 || g.span_end > img.width || g.span_end <= g.span_start) {
      throw Error(ErrorCode::kOutOfRange, "span out of bounds for glyph '" + encode_utf8(g.character) + "'");
    }
    if (g.span_start < prev_end) {
      throw Error(ErrorCode::kMalformedInput, "span overlap at glyph '" + encode_utf8(g.character) + "'");
    }
    if (g.advance < 0 || g.lsb < 0) {
      throw Error(ErrorCode::kOutOfRange, "negative alignment for glyph '" + encode_utf8(g.character) + "'");
    }
    prev_end = g.span_end;
  }
  for (std::size_t i = 0; i < atlas.glyphs.size(); ++i) {
    for (std::size_t j = i + 1; j < atlas.glyphs.size(); ++j) {
      if (atlas.glyphs[i].character == atlas.glyphs[j].character) {
        throw Error(ErrorCode::kMalformedInput, "duplicate glyph '" + encode_utf8(atlas.glyphs[i].character) + "'");
      }
    }
  }
}

GlyphAtlas atlas_from_json(const Json& meta, GrayImage image) {
  GlyphAtlas atlas;
  try {
    atlas.font_name = meta.at("font_name").get<std::string>();
    atlas.point_size = meta.at("point_size").get<int>();
    atlas.units_per_em = meta.at("units_per_em").get<double>();
    if (meta.contains("baseline") && !meta["baseline"].is_null()) atlas.baseline = meta["baseline"].get<int>();
    for (const auto& g : meta.at("glyphs")) {
      GlyphEntry e;
      e.character = single_code_point(g.at("char").get<std::string>());
      const auto& span = g.at("span");
      if (!span.is_array() || span.size() != 2) throw Error(ErrorCode::kMalformedInput, "span must be [start, end)");
      e.span_start = span[0].get<int>();
      e.span_end = span[1].get<int>();
      e.advance = g.at("advance").get<double>();
      e.lsb = g.at("lsb").get<double>();
      atlas.glyphs.push_back(e);
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, std::string("atlas metadata: ") + e.what());
  }
  atlas.image = std::move(image);
  validate_atlas(atlas);
  return atlas;
}

Json atlas_metadata_json(const GlyphAtlas& atlas) {
  Json glyphs = Json::array();
  for (const auto& g : atlas.glyphs) {
    glyphs.push_back({{"char", encode_utf8(g.character)},
                      {"span", {g.span_start, g.span_end}},
                      {"advance", g.advance},
                      {"lsb", g.lsb}});
  }
  Json doc = {{"font_name", atlas.font_name},
              {"point_size", atlas.point_size},
              {"units_per_em", atlas.units_per_em},
              {"glyphs", glyphs}};
  if (atlas.baseline) doc["baseline"] = *atlas.baseline;
  return doc;
}

GlyphAtlas ingest_atlas(const std::filesystem::path& image_path, const std::filesystem::path& metadata_path,
                        const GlyphAtlas* corpus_template) {
  GlyphAtlas atlas = atlas_from_json(read_json_file(metadata_path), read_pgm(image_path));
  if (corpus_template) {
    if (atlas.image.height != corpus_template->image.height || atlas.image.width != corpus_template->image.width) {
      throw Error(ErrorCode::kInconsistentCorpus, "raster size differs from corpus template: " + atlas.font_name);
    }
    const auto& a = atlas.glyphs;
    const auto& t = corpus_template->glyphs;
    const bool same = a.size() == t.size() &&
                      std::equal(a.begin(), a.end(), t.begin(),
                                 [](const GlyphEntry& x, const GlyphEntry& y) { return x.character == y.character; });
    if (!same) throw Error(ErrorCode::kInconsistentCorpus, "glyph set differs from corpus template: " + atlas.font_name);
  }
  return atlas;
}

void write_atlas(const std::filesystem::path& dir, const std::string& stem, const GlyphAtlas& atlas) {
  std::filesystem::create_directories(dir);
  write_pgm(dir / (stem + ".pgm"), atlas.image);
  write_json_file(dir / (stem + ".json"), atlas_metadata_json(atlas), 1);
}

std::vector<GlyphAtlas> ingest_corpus_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> images;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".pgm") images.push_back(entry.path());
  }
  std::sort(images.begin(), images.end());
  std::vector<GlyphAtlas> atlases;
  for (const auto& img : images) {
    auto meta = img;
    meta.replace_extension(".json");
    if (!std::filesystem::exists(meta)) continue;
    atlases.push_back(ingest_atlas(img, meta, atlases.empty() ? nullptr : &atlases.front()));
  }
  if (atlases.empty()) throw Error(ErrorCode::kIo, "no atlases found in " + dir.string());
  return atlases;
}

}  // namespace adaptifont::fontspace
