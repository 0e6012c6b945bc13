#include "adaptifont/analysis/optics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "adaptifont/error.hpp"

namespace adaptifont::analysis {

namespace {

// Rounds to 15 decimals so near-ties in distances compare as ties.
double round15(double x) {
  if (!std::isfinite(x)) return x;
  return std::nearbyint(x * 1e15) / 1e15;
}

struct SteepDown {
  int start;
  int end;
  double mib;
};

int extend_region(const std::vector<bool>& steep, const std::vector<bool>& xward, int start, int min_pts) {
  const int n = static_cast<int>(steep.size());
  int non_xward = 0;
  int end = start;
  for (int i = start; i < n; ++i) {
    if (steep[static_cast<std::size_t>(i)]) {
      non_xward = 0;
      end = i;
    } else if (!xward[static_cast<std::size_t>(i)]) {
      if (++non_xward > min_pts) break;
    } else {
      return end;
    }
  }
  return end;
}

void update_filter(std::vector<SteepDown>& sdas, double mib, double xi_complement, const std::vector<double>& rp) {
  if (std::isinf(mib)) {
    sdas.clear();
    return;
  }
  std::vector<SteepDown> kept;
  for (auto d : sdas) {
    if (mib <= rp[static_cast<std::size_t>(d.start)] * xi_complement) {
      d.mib = std::max(d.mib, mib);
      kept.push_back(d);
    }
  }
  sdas = std::move(kept);
}

std::optional<std::pair<int, int>> correct_predecessor(const std::vector<double>& rp, const std::vector<int>& pred,
                                                       const std::vector<int>& ordering, int s, int e) {
  while (s < e) {
    if (rp[static_cast<std::size_t>(s)] > rp[static_cast<std::size_t>(e)]) return std::make_pair(s, e);
    const int pe = pred[static_cast<std::size_t>(e)];
    for (int i = s; i < e; ++i) {
      if (pe == ordering[static_cast<std::size_t>(i)]) return std::make_pair(s, e);
    }
    --e;
  }
  return std::nullopt;
}

}  // namespace

ReachabilityOrdering optics(const Eigen::MatrixXd& points, int min_pts, double max_eps) {
  const int n = static_cast<int>(points.rows());
  if (min_pts < 2) throw Error(ErrorCode::kInvalidArgument, "min_pts must be >= 2");
  if (n < min_pts) throw Error(ErrorCode::kInvalidArgument, "optics needs at least min_pts points");
  if (!points.allFinite()) throw Error(ErrorCode::kInvalidArgument, "points must be finite");
  if (!(max_eps > 0)) throw Error(ErrorCode::kInvalidArgument, "max_eps must be positive");

  Eigen::MatrixXd dist(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) dist(i, j) = (points.row(i) - points.row(j)).norm();
  }

  ReachabilityOrdering r;
  r.reachability.assign(static_cast<std::size_t>(n), kInf);
  r.predecessor.assign(static_cast<std::size_t>(n), -1);
  r.core_distance.resize(static_cast<std::size_t>(n));
  std::vector<double> row(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = dist(i, j);
    std::nth_element(row.begin(), row.begin() + (min_pts - 1), row.end());
    const double cd = row[static_cast<std::size_t>(min_pts - 1)];
    r.core_distance[static_cast<std::size_t>(i)] = cd > max_eps ? kInf : round15(cd);
  }

  std::vector<bool> processed(static_cast<std::size_t>(n), false);
  for (int step = 0; step < n; ++step) {
    int point = -1;
    for (int i = 0; i < n; ++i) {
      if (processed[static_cast<std::size_t>(i)]) continue;
      if (point < 0 || r.reachability[static_cast<std::size_t>(i)] < r.reachability[static_cast<std::size_t>(point)])
        point = i;
    }
    processed[static_cast<std::size_t>(point)] = true;
    r.ordering.push_back(point);
    const double cd = r.core_distance[static_cast<std::size_t>(point)];
    if (std::isinf(cd)) continue;
    for (int j = 0; j < n; ++j) {
      if (processed[static_cast<std::size_t>(j)] || dist(point, j) > max_eps) continue;
      const double rd = round15(std::max(dist(point, j), cd));
      if (rd < r.reachability[static_cast<std::size_t>(j)]) {
        r.reachability[static_cast<std::size_t>(j)] = rd;
        r.predecessor[static_cast<std::size_t>(j)] = point;
      }
    }
  }
  return r;
}

std::vector<XiRange> xi_ranges(const ReachabilityOrdering& r, double xi, int min_pts, int min_cluster_size,
                               bool predecessor_correction) {
  if (!(xi > 0 && xi < 1)) throw Error(ErrorCode::kInvalidArgument, "xi must lie in (0, 1)");
  if (min_cluster_size < 0) min_cluster_size = min_pts;
  const std::size_t n = r.ordering.size();
  std::vector<double> rp(n + 1);
  std::vector<int> pred(n);
  for (std::size_t i = 0; i < n; ++i) {
    rp[i] = r.reachability[static_cast<std::size_t>(r.ordering[i])];
    pred[i] = r.predecessor[static_cast<std::size_t>(r.ordering[i])];
  }
  rp[n] = kInf;

  const double xc = 1 - xi;
  std::vector<bool> steep_up(n), steep_down(n), down(n), up(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ratio = rp[i] / rp[i + 1];  // NaN compares false throughout
    steep_up[i] = ratio <= xc;
    steep_down[i] = ratio >= 1 / xc;
    down[i] = ratio > 1;
    up[i] = ratio < 1;
  }

  std::vector<SteepDown> sdas;
  std::vector<XiRange> clusters;
  int index = 0;
  double mib = 0.0;
  for (int si = 0; si < static_cast<int>(n); ++si) {
    const auto s = static_cast<std::size_t>(si);
    if (!(steep_up[s] || steep_down[s])) continue;
    if (si < index) continue;
    for (int k = index; k <= si; ++k) mib = std::max(mib, rp[static_cast<std::size_t>(k)]);

    if (steep_down[s]) {
      update_filter(sdas, mib, xc, rp);
      const int d_end = extend_region(steep_down, up, si, min_pts);
      sdas.push_back({si, d_end, 0.0});
      index = d_end + 1;
      mib = rp[static_cast<std::size_t>(index)];
      continue;
    }

    update_filter(sdas, mib, xc, rp);
    const int u_start = si;
    const int u_end = extend_region(steep_up, down, u_start, min_pts);
    index = u_end + 1;
    mib = rp[static_cast<std::size_t>(index)];

    std::vector<XiRange> found;
    for (const auto& d : sdas) {
      int c_start = d.start;
      int c_end = u_end;
      const double r_after = rp[static_cast<std::size_t>(c_end + 1)];
      if (r_after * xc < d.mib) continue;
      const double d_max = rp[static_cast<std::size_t>(d.start)];
      if (d_max * xc >= r_after) {
        while (rp[static_cast<std::size_t>(c_start + 1)] > r_after && c_start < d.end) ++c_start;
      } else if (r_after * xc >= d_max) {
        while (rp[static_cast<std::size_t>(c_end - 1)] > d_max && c_end > u_start) --c_end;
      }
      if (predecessor_correction) {
        const auto corrected = correct_predecessor(rp, pred, r.ordering, c_start, c_end);
        if (!corrected) continue;
        c_start = corrected->first;
        c_end = corrected->second;
      }
      if (c_end - c_start + 1 < min_cluster_size) continue;
      if (c_start > d.end) continue;
      if (c_end < u_start) continue;
      found.push_back({c_start, c_end});
    }
    clusters.insert(clusters.end(), found.rbegin(), found.rend());
  }
  return clusters;
}

std::vector<int> xi_labels(const ReachabilityOrdering& r, const std::vector<XiRange>& ranges) {
  const std::size_t n = r.ordering.size();
  std::vector<int> by_position(n, -1);
  int label = 0;
  for (const auto& c : ranges) {
    bool free = true;
    for (int i = c.start; i <= c.end; ++i) free = free && by_position[static_cast<std::size_t>(i)] == -1;
    if (!free) continue;
    for (int i = c.start; i <= c.end; ++i) by_position[static_cast<std::size_t>(i)] = label;
    ++label;
  }
  std::vector<int> labels(n, -1);
  for (std::size_t i = 0; i < n; ++i) labels[static_cast<std::size_t>(r.ordering[i])] = by_position[i];
  return labels;
}

std::vector<XiRange> significant_ranges(const ReachabilityOrdering& r, const std::vector<XiRange>& ranges,
                                        double significance) {
  if (!(significance > 0 && significance < 1)) throw Error(ErrorCode::kInvalidArgument, "significance must lie in (0, 1)");
  const int n = static_cast<int>(r.ordering.size());
  std::vector<double> rp(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) rp[static_cast<std::size_t>(i)] = r.reachability[static_cast<std::size_t>(r.ordering[static_cast<std::size_t>(i)])];
  auto inside = [](const XiRange& a, const XiRange& b) { return b.start <= a.start && a.end <= b.end; };

  auto children = [&](const XiRange& p) {
    std::vector<XiRange> out;
    for (const auto& x : ranges) {
      if (x == p || !inside(x, p)) continue;
      bool maximal = true;
      for (const auto& y : ranges) {
        if (!(y == x) && !(y == p) && inside(x, y) && inside(y, p)) maximal = false;
      }
      if (maximal && std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
    }
    std::sort(out.begin(), out.end(), [](const XiRange& a, const XiRange& b) { return a.start < b.start; });
    return out;
  };
  auto mean_inside = [&](const XiRange& c) {
    double sum = 0;
    int k = 0;
    for (int i = c.start + 1; i <= c.end; ++i, ++k) sum += rp[static_cast<std::size_t>(i)];
    return k ? sum / k : 0.0;
  };

  std::vector<XiRange> out;
  std::function<void(const XiRange&, bool)> descend = [&](const XiRange& p, bool is_cluster) {
    const auto ch = children(p);
    bool split = !is_cluster || ch.size() >= 2;
    for (std::size_t i = 1; split && is_cluster && i < ch.size(); ++i) {
      double barrier = 0;
      for (int k = ch[i - 1].end + 1; k <= ch[i].start; ++k) barrier = std::max(barrier, rp[static_cast<std::size_t>(k)]);
      split = mean_inside(ch[i - 1]) <= significance * barrier && mean_inside(ch[i]) <= significance * barrier;
    }
    if (!split) {
      out.push_back(p);
      return;
    }
    for (const auto& c : ch) descend(c, true);
  };
  if (n == 0) return out;
  const XiRange all{0, n - 1};
  descend(all, std::find(ranges.begin(), ranges.end(), all) != ranges.end());
  return out;
}

std::vector<int> range_labels(const ReachabilityOrdering& r, const std::vector<XiRange>& disjoint) {
  std::vector<int> labels(r.ordering.size(), -1);
  int label = 0;
  for (const auto& c : disjoint) {
    for (int i = c.start; i <= c.end; ++i) labels[static_cast<std::size_t>(r.ordering[static_cast<std::size_t>(i)])] = label;
    ++label;
  }
  return labels;
}

Eigen::MatrixXd zscore(const Eigen::MatrixXd& points) {
  Eigen::MatrixXd z = points;
  const double n = static_cast<double>(points.rows());
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const double mean = points.col(j).mean();
    const double sd = std::sqrt((points.col(j).array() - mean).square().sum() / n);
    if (sd > 0) {
      z.col(j) = (points.col(j).array() - mean) / sd;
    } else {
      z.col(j).setZero();
    }
  }
  return z;
}

}  // namespace adaptifont::analysis
