#pragma once

#include <string>
#include <vector>

#include "adaptifont/fontgen/font.hpp"

namespace adaptifont::fontgen {

/// SVG path data ("M x y L ... Z" per contour), 3 decimals.
std::string path_data(const std::vector<Contour>& contours);

/// SVG 1.1 font document with one <glyph> per outline. Throws
/// Error(kInvalidArgument) for characters XML cannot carry.
std::string emit_svg_font(const SynthFont& font);

}  // namespace adaptifont::fontgen
