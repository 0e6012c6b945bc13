#pragma once

#include <Eigen/Dense>
#include <vector>

#include "adaptifont/fontgen/font.hpp"
#include "adaptifont/fontgen/trace.hpp"
#include "adaptifont/optimizer/gp.hpp"

namespace adaptifont::testing {

/// Second, independently written Matern 5/2: exp(-a) (1 + a + a^2/3), a = sqrt(5) r / l.
double matern_dual(double r, double l, double s2);

/// Dense posterior via a full-pivot LU solve of (K + noise I).
optimizer::Posterior dense_posterior(const std::vector<optimizer::Observation>& obs, const optimizer::KernelParams& p,
                                     const optimizer::Standardization& st, const Eigen::Vector3d& x);

/// Winding number of a closed polyline around p, by summed angles.
double winding_number(const fontgen::Contour& poly, const fontgen::Point2& p);

/// Every contour closed and finite, and oriented by nesting depth in `raw`
/// (even depth counter-clockwise, odd depth clockwise).
bool orientation_ok(const std::vector<fontgen::Contour>& raw, const std::vector<fontgen::Contour>& simplified);

/// Glyph outline in font units back to the pixel frame of its cell.
std::vector<fontgen::Contour> to_pixel_frame(const fontgen::GlyphOutline& o, const fontspace::CorpusLayout& layout);

}  // namespace adaptifont::testing
