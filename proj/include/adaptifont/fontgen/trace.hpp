#pragma once

#include <vector>

#include "adaptifont/fontgen/raster.hpp"

namespace adaptifont::fontgen {

struct Point2 {
  double x = 0;
  double y = 0;
  bool operator==(const Point2&) const = default;
};

/// Closed polyline; the first point is repeated at the end.
using Contour = std::vector<Point2>;

/// Shoelace area; positive for counter-clockwise in a y-up frame.
double signed_area(const Contour& c);

bool is_closed(const Contour& c);

/// Douglas-Peucker on a closed contour. Keeps at least three distinct vertices.
Contour simplify_closed(const Contour& c, double epsilon);

struct TraceOptions {
  double epsilon = 0.35;  // simplification tolerance, px
};

/// Marching-squares tracing of a binary mask. Output frame is y-up pixel
/// units: pixel (row r, col c) covers [c, c+1] x [H-r-1, H-r]. Ink is on the
/// left of every contour, so outer boundaries are counter-clockwise and holes
/// clockwise.
std::vector<Contour> trace_glyph(const Bitmask& mask, const TraceOptions& opts = {});

/// Scanline fill of contours in the trace frame, sampled at pixel centres
/// with the nonzero winding rule.
Bitmask rasterize(const std::vector<Contour>& contours, int height, int width);

/// |a & b| / |a | b|; 1 when both are empty.
double iou(const Bitmask& a, const Bitmask& b);

}  // namespace adaptifont::fontgen
