#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "adaptifont/json_io.hpp"

namespace adaptifont::fontspace {

/// 8-bit grayscale raster, row-major, ink = high values.
struct GrayImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int row, int col) const {
    return pixels[static_cast<std::size_t>(row) * width + col];
  }
};

GrayImage read_pgm(const std::filesystem::path& path);
GrayImage parse_pgm(const std::string& bytes);
std::string encode_pgm(const GrayImage& image);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

struct GlyphEntry {
  char32_t character = 0;
  int span_start = 0;  // first pixel column, inclusive
  int span_end = 0;    // exclusive
  double advance = 0;  // font units
  double lsb = 0;      // font units
};

/// One font's raster plus per-glyph alignment metadata.
struct GlyphAtlas {
  std::string font_name;
  int point_size = 0;
  double units_per_em = 1000;
  std::optional<int> baseline;  // pixel row of the baseline, from the top
  GrayImage image;
  std::vector<GlyphEntry> glyphs;
};

/// Validates spans (ordered, disjoint, in-bounds) and image consistency.
void validate_atlas(const GlyphAtlas& atlas);

/// Reads a P5 image and its JSON metadata. When `corpus_template` is given,
/// the glyph characters, their order and the raster size must match it.
GlyphAtlas ingest_atlas(const std::filesystem::path& image_path,
                        const std::filesystem::path& metadata_path,
                        const GlyphAtlas* corpus_template = nullptr);

GlyphAtlas atlas_from_json(const Json& metadata, GrayImage image);
Json atlas_metadata_json(const GlyphAtlas& atlas);

/// Writes `<stem>.pgm` and `<stem>.json` into `dir`.
void write_atlas(const std::filesystem::path& dir, const std::string& stem, const GlyphAtlas& atlas);

/// Loads every `*.pgm` with a sibling `*.json` in `dir`, sorted by file name,
/// checking each against the first.
std::vector<GlyphAtlas> ingest_corpus_dir(const std::filesystem::path& dir);

}  // namespace adaptifont::fontspace
