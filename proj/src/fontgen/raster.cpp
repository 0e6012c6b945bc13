#include "adaptifont/fontgen/raster.hpp"

#include <algorithm>

#include "adaptifont/error.hpp"

namespace adaptifont::fontgen {

std::size_t Bitmask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

Bitmask binarize(const Raster& raster, double threshold) {
  Bitmask m(raster.height, raster.width);
  for (std::size_t i = 0; i < raster.values.size(); ++i) m.bits[i] = raster.values[i] >= threshold ? 1 : 0;
  return m;
}

Raster crop_columns(const Raster& raster, int col_begin, int col_end) {
  if (col_begin < 0 || col_end > raster.width || col_end < col_begin) {
    throw Error(ErrorCode::kOutOfRange, "crop outside raster");
  }
  Raster out;
  out.height = raster.height;
  out.width = col_end - col_begin;
  out.values.reserve(static_cast<std::size_t>(out.height) * out.width);
  for (int r = 0; r < raster.height; ++r) {
    const auto row = raster.values.begin() + static_cast<std::ptrdiff_t>(r) * raster.width;
    out.values.insert(out.values.end(), row + col_begin, row + col_end);
  }
  return out;
}

}  // namespace adaptifont::fontgen
