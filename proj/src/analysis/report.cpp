#include "adaptifont/analysis/report.hpp"

#include <algorithm>
#include <cmath>

#include "adaptifont/error.hpp"

namespace adaptifont::analysis {

Eigen::MatrixXd point_matrix(const std::vector<LabeledPoint>& points) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size()), 4);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    m.row(r) << points[i].c[0], points[i].c[1], points[i].c[2], points[i].wpm;
  }
  return m;
}

std::vector<int> cluster_labels(const std::vector<LabeledPoint>& points, const ClusterOptions& opts) {
  Eigen::MatrixXd m = point_matrix(points);
  if (opts.standardize) m = zscore(m);
  const auto ordering = optics(m, opts.min_pts, opts.max_eps);
  const auto ranges = xi_ranges(ordering, opts.xi, opts.min_pts);
  if (!opts.significant_cut) return xi_labels(ordering, ranges);
  return range_labels(ordering, significant_ranges(ordering, ranges, opts.significance));
}

Cluster make_cluster(const std::vector<LabeledPoint>& points, std::vector<int> members) {
  if (members.empty()) throw Error(ErrorCode::kInvalidArgument, "cluster has no members");
  Cluster c;
  c.members = std::move(members);
  const double n = static_cast<double>(c.members.size());
  Eigen::Vector4d sum = Eigen::Vector4d::Zero();
  for (int i : c.members) {
    const auto& p = points.at(static_cast<std::size_t>(i));
    sum += Eigen::Vector4d(p.c[0], p.c[1], p.c[2], p.wpm);
  }
  c.centroid = sum / n;
  c.mean_wpm = c.centroid[3];
  if (c.members.size() > 1) {
    Eigen::Vector3d ss = Eigen::Vector3d::Zero();
    for (int i : c.members) {
      const auto& p = points[static_cast<std::size_t>(i)];
      ss += (p.c.value - c.centroid.head<3>()).array().square().matrix();
    }
    c.se_axes = (ss / (n - 1)).array().sqrt() / std::sqrt(n);
  }
  return c;
}

std::vector<Cluster> extract_clusters(const std::vector<LabeledPoint>& points, const ClusterOptions& opts) {
  const auto labels = cluster_labels(points, opts);
  const int n_labels = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n_labels));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) members[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));
  }
  std::vector<Cluster> out;
  for (auto& m : members) out.push_back(make_cluster(points, std::move(m)));
  return out;
}

std::size_t best_cluster(const std::vector<Cluster>& clusters) {
  if (clusters.empty()) throw Error(ErrorCode::kInvalidArgument, "no clusters");
  std::size_t best = 0;
  for (std::size_t i = 1; i < clusters.size(); ++i) {
    const auto& a = clusters[i];
    const auto& b = clusters[best];
    if (a.mean_wpm > b.mean_wpm || (a.mean_wpm == b.mean_wpm && a.members.size() > b.members.size())) best = i;
  }
  return best;
}

DistanceReport distance_report(const std::vector<FontCoordinates>& coords) {
  const auto n = static_cast<Eigen::Index>(coords.size());
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "distance report needs at least two points");
  DistanceReport r;
  r.distances = Eigen::MatrixXd::Zero(n, n);
  r.min = kInf;
  r.max = 0;
  double sum = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (coords[static_cast<std::size_t>(i)].value - coords[static_cast<std::size_t>(j)].value).norm();
      r.distances(i, j) = r.distances(j, i) = d;
      r.min = std::min(r.min, d);
      r.max = std::max(r.max, d);
      sum += d;
    }
  }
  r.mean = sum / (static_cast<double>(n) * static_cast<double>(n - 1) / 2);
  return r;
}

CentroidFont centroid_font(const Cluster& cluster, const fontspace::FontBasis& basis,
                           const fontgen::FeasibleRegion& region) {
  if (cluster.members.empty()) throw Error(ErrorCode::kInvalidArgument, "cluster has no members");
  const FontCoordinates c(cluster.centroid.head<3>().eval());
  fontgen::BuildOptions bo;
  bo.region = region;
  bo.force = !region.contains(c);
  return {fontgen::build_font(c, basis, bo), bo.force};
}

std::vector<LabeledPoint> points_from_log(const std::vector<Json>& events, bool include_resets) {
  std::vector<LabeledPoint> out;
  try {
    for (const auto& e : events) {
      const std::string kind = e.at("event").get<std::string>();
      if (kind != "result" && !(include_resets && kind == "reset")) continue;
      const auto& p = e.at("payload");
      const auto& c = p.at("coords");
      out.push_back({FontCoordinates(c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()),
                     p.at("wpm").get<double>(), p.at("index").get<int>()});
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, std::string("log: ") + e.what());
  }
  return out;
}

Json cluster_to_json(const Cluster& c) {
  return {{"members", c.members},
          {"centroid", {c.centroid[0], c.centroid[1], c.centroid[2], c.centroid[3]}},
          {"se_axes", {c.se_axes[0], c.se_axes[1], c.se_axes[2]}},
          {"mean_wpm", c.mean_wpm}};
}

Json distance_report_to_json(const DistanceReport& d) {
  Json m = Json::array();
  for (Eigen::Index i = 0; i < d.distances.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < d.distances.cols(); ++j) row.push_back(d.distances(i, j));
    m.push_back(std::move(row));
  }
  return {{"matrix", m}, {"min", d.min}, {"max", d.max}, {"mean", d.mean}};
}

Json analysis_report(const std::vector<LabeledPoint>& points, const ClusterOptions& opts) {
  Json rep = {{"n_points", points.size()}, {"min_pts", opts.min_pts}, {"xi", opts.xi}};
  if (static_cast<int>(points.size()) < opts.min_pts) {
    rep["clusters"] = Json::array();
    rep["best"] = nullptr;
    rep["distances"] = nullptr;
    return rep;
  }
  const auto clusters = extract_clusters(points, opts);
  Json arr = Json::array();
  for (const auto& c : clusters) arr.push_back(cluster_to_json(c));
  rep["clusters"] = std::move(arr);
  rep["best"] = clusters.empty() ? Json(nullptr) : Json(best_cluster(clusters));
  if (clusters.size() >= 2) {
    std::vector<FontCoordinates> cs;
    for (const auto& c : clusters) cs.emplace_back(c.centroid.head<3>().eval());
    rep["distances"] = distance_report_to_json(distance_report(cs));
  } else {
    rep["distances"] = nullptr;
  }
  return rep;
}

}  // namespace adaptifont::analysis
