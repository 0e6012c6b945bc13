#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adaptifont/analysis/optics.hpp"
#include "adaptifont/fontgen/font.hpp"
#include "adaptifont/json_io.hpp"

namespace adaptifont::analysis {

using fontgen::FontCoordinates;

struct LabeledPoint {
  FontCoordinates c;
  double wpm = 0;
  int trial = 0;  // schedule index
};

struct Cluster {
  std::vector<int> members;  // indices into the point list
  Eigen::Vector4d centroid = Eigen::Vector4d::Zero();  // raw units: c, wpm
  Eigen::Vector3d se_axes = Eigen::Vector3d::Zero();   // sd / sqrt(n) per font dimension
  double mean_wpm = 0;
};

struct ClusterOptions {
  int min_pts = 5;
  double xi = 0.05;
  double max_eps = kInf;
  bool standardize = true;
  /// false: label the leaves of the xi hierarchy first, as scikit-learn does.
  bool significant_cut = true;
  double significance = 0.75;
};

/// Rows of (c0, c1, c2, wpm).
Eigen::MatrixXd point_matrix(const std::vector<LabeledPoint>& points);

/// Flat cluster labels (-1 = noise) for the points.
std::vector<int> cluster_labels(const std::vector<LabeledPoint>& points, const ClusterOptions& opts = {});

/// OPTICS + xi extraction + per-cluster statistics, ordered by label.
std::vector<Cluster> extract_clusters(const std::vector<LabeledPoint>& points, const ClusterOptions& opts = {});

/// Cluster statistics for an explicit member list.
Cluster make_cluster(const std::vector<LabeledPoint>& points, std::vector<int> members);

/// Highest mean wpm; ties go to the larger cluster, then the lower index.
std::size_t best_cluster(const std::vector<Cluster>& clusters);

struct DistanceReport {
  Eigen::MatrixXd distances;
  double min = 0;
  double max = 0;
  double mean = 0;
};

/// Pairwise Euclidean distances in raw font units; summary over i < j.
DistanceReport distance_report(const std::vector<FontCoordinates>& coords);

struct CentroidFont {
  fontgen::SynthFont font;
  bool forced = false;  // centroid outside the feasible region
};

CentroidFont centroid_font(const Cluster& cluster, const fontspace::FontBasis& basis,
                           const fontgen::FeasibleRegion& region = {});

/// Points from the result events of a trial log; reset events (0 wpm) are
/// included on request.
std::vector<LabeledPoint> points_from_log(const std::vector<Json>& events, bool include_resets = false);

Json cluster_to_json(const Cluster& c);
Json distance_report_to_json(const DistanceReport& d);

/// {clusters, best, distances}. `distances` covers the cluster centroids when
/// there are at least two clusters and is null otherwise.
Json analysis_report(const std::vector<LabeledPoint>& points, const ClusterOptions& opts = {});

}  // namespace adaptifont::analysis
