#include "adaptifont/fontgen/trace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <utility>

#include "adaptifont/error.hpp"

namespace adaptifont::fontgen {

double signed_area(const Contour& c) {
  double a = 0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) a += c[i].x * c[i + 1].y - c[i + 1].x * c[i].y;
  if (!c.empty() && !(c.front() == c.back())) a += c.back().x * c.front().y - c.front().x * c.back().y;
  return 0.5 * a;
}

bool is_closed(const Contour& c) { return c.size() >= 4 && c.front() == c.back(); }

namespace {

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0) return std::hypot(p.x - a.x, p.y - a.y);
  double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  t = std::max(0.0, std::min(1.0, t));
  return std::hypot(a.x + t * dx - p.x, a.y + t * dy - p.y);
}

// Marks the vertices of pts[first..last] that survive Douglas-Peucker.
void douglas_peucker(const std::vector<Point2>& pts, std::size_t first, std::size_t last, double eps,
                     std::vector<bool>& keep) {
  std::vector<std::pair<std::size_t, std::size_t>> stack{{first, last}};
  while (!stack.empty()) {
    const auto [a, b] = stack.back();
    stack.pop_back();
    if (b <= a + 1) continue;
    double worst = -1;
    std::size_t idx = a;
    for (std::size_t i = a + 1; i < b; ++i) {
      const double d = point_segment_distance(pts[i], pts[a], pts[b]);
      if (d > worst) {
        worst = d;
        idx = i;
      }
    }
    if (worst > eps) {
      keep[idx] = true;
      stack.push_back({a, idx});
      stack.push_back({idx, b});
    }
  }
}

}  // namespace

Contour simplify_closed(const Contour& c, double epsilon) {
  if (c.size() < 5 || epsilon <= 0) return c;
  // distinct vertices, closing duplicate dropped
  std::vector<Point2> pts(c.begin(), c.end() - (c.front() == c.back() ? 1 : 0));
  const std::size_t n = pts.size();
  std::size_t far = 0;
  double best = -1;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = std::hypot(pts[i].x - pts[0].x, pts[i].y - pts[0].y);
    if (d > best) {
      best = d;
      far = i;
    }
  }
  std::vector<Point2> ring(pts);
  ring.push_back(pts[0]);
  std::vector<bool> keep(ring.size(), false);
  keep[0] = keep[far] = keep[n] = true;
  douglas_peucker(ring, 0, far, epsilon, keep);
  douglas_peucker(ring, far, n, epsilon, keep);

  Contour out;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) out.push_back(ring[i]);
  if (out.size() < 3) return c;
  out.push_back(out.front());
  return out;
}

std::vector<Contour> trace_glyph(const Bitmask& mask, const TraceOptions& opts) {
  const int H = mask.height;
  const int W = mask.width;
  // Samples live on a grid padded by one empty pixel on every side.
  auto sample = [&](int r, int c) -> int {
    const int rr = r - 1, cc = c - 1;
    if (rr < 0 || cc < 0 || rr >= H || cc >= W) return 0;
    return mask.at(rr, cc) ? 1 : 0;
  };
  const std::int64_t stride = 2 * static_cast<std::int64_t>(W) + 8;
  // Crossing on the edge between samples s1 and s2 keyed by (r1+r2, c1+c2).
  auto key = [&](int r1, int c1, int r2, int c2) -> std::int64_t {
    return static_cast<std::int64_t>(r1 + r2) * stride + (c1 + c2);
  };
  auto position = [&](std::int64_t k) {
    const double a = static_cast<double>(k / stride);
    const double b = static_cast<double>(k % stride);
    return Point2{b / 2.0 - 0.5, H + 0.5 - a / 2.0};
  };

  std::unordered_map<std::int64_t, std::int64_t> next;
  std::vector<std::int64_t> starts;
  for (int r = 0; r <= H; ++r) {
    for (int c = 0; c <= W; ++c) {
      // corners counter-clockwise in the y-up frame: BL, BR, TR, TL
      const std::array<std::pair<int, int>, 4> corner = {
          std::pair{r + 1, c}, std::pair{r + 1, c + 1}, std::pair{r, c + 1}, std::pair{r, c}};
      std::array<int, 4> v{};
      int ink = 0;
      for (int i = 0; i < 4; ++i) {
        v[static_cast<std::size_t>(i)] = sample(corner[static_cast<std::size_t>(i)].first, corner[static_cast<std::size_t>(i)].second);
        ink += v[static_cast<std::size_t>(i)];
      }
      if (ink == 0 || ink == 4) continue;
      // Walk the cell boundary; every ink->empty crossing starts a segment
      // that ends at the next empty->ink crossing, keeping ink on the left.
      std::array<std::int64_t, 4> point{};
      std::array<int, 4> kind{};  // +1 out, -1 in, 0 none
      for (int i = 0; i < 4; ++i) {
        const auto a = static_cast<std::size_t>(i);
        const auto b = static_cast<std::size_t>((i + 1) % 4);
        if (v[a] == v[b]) continue;
        point[a] = key(corner[a].first, corner[a].second, corner[b].first, corner[b].second);
        kind[a] = v[a] == 1 ? 1 : -1;
      }
      for (int i = 0; i < 4; ++i) {
        if (kind[static_cast<std::size_t>(i)] != 1) continue;
        for (int step = 1; step < 4; ++step) {
          const auto j = static_cast<std::size_t>((i + step) % 4);
          if (kind[j] == -1) {
            next[point[static_cast<std::size_t>(i)]] = point[j];
            starts.push_back(point[static_cast<std::size_t>(i)]);
            break;
          }
        }
      }
    }
  }

  std::vector<Contour> contours;
  std::unordered_map<std::int64_t, bool> used;
  for (const std::int64_t s : starts) {
    if (used[s]) continue;
    Contour loop;
    std::int64_t k = s;
    while (!used[k]) {
      used[k] = true;
      loop.push_back(position(k));
      k = next.at(k);
    }
    loop.push_back(loop.front());
    contours.push_back(simplify_closed(loop, opts.epsilon));
  }
  return contours;
}

}  // namespace adaptifont::fontgen

namespace adaptifont::fontgen {

Bitmask rasterize(const std::vector<Contour>& contours, int height, int width) {
  Bitmask out(height, width);
  std::vector<std::pair<double, int>> crossings;
  for (int r = 0; r < height; ++r) {
    const double y = height - r - 0.5;
    crossings.clear();
    for (const auto& c : contours) {
      for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        const Point2& a = c[i];
        const Point2& b = c[i + 1];
        // half-open in y so shared vertices count once
        if ((a.y <= y) == (b.y <= y)) continue;
        const double x = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
        crossings.push_back({x, b.y > a.y ? 1 : -1});
      }
    }
    std::sort(crossings.begin(), crossings.end());
    int winding = 0;
    std::size_t k = 0;
    for (int col = 0; col < width; ++col) {
      const double x = col + 0.5;
      while (k < crossings.size() && crossings[k].first <= x) winding += crossings[k++].second;
      if (winding != 0) out.set(r, col, true);
    }
  }
  return out;
}

double iou(const Bitmask& a, const Bitmask& b) {
  if (a.height != b.height || a.width != b.width) throw Error(ErrorCode::kDimensionMismatch, "mask shapes differ");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    inter += a.bits[i] && b.bits[i];
    uni += a.bits[i] || b.bits[i];
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace adaptifont::fontgen
