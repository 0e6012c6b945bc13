#pragma once

#include <cstdint>
#include <vector>

namespace adaptifont::fontgen {

/// Real-valued raster, row-major, ink = high.
struct Raster {
  int height = 0;
  int width = 0;
  std::vector<double> values;

  double at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
};

struct Bitmask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> bits;

  Bitmask() = default;
  Bitmask(int h, int w) : height(h), width(w), bits(static_cast<std::size_t>(h) * w, 0) {}

  bool at(int row, int col) const { return bits[static_cast<std::size_t>(row) * width + col] != 0; }
  void set(int row, int col, bool v) { bits[static_cast<std::size_t>(row) * width + col] = v ? 1 : 0; }
  std::size_t count() const;
  bool operator==(const Bitmask&) const = default;
};

/// mask = raster >= threshold
Bitmask binarize(const Raster& raster, double threshold = 0.5);

/// Columns [col_begin, col_end) of `raster`.
Raster crop_columns(const Raster& raster, int col_begin, int col_end);

}  // namespace adaptifont::fontgen
