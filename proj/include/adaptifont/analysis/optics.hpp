#pragma once

#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace adaptifont::analysis {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct ReachabilityOrdering {
  std::vector<int> ordering;         // processing order, a permutation
  std::vector<double> reachability;  // per point, kInf where undefined
  std::vector<double> core_distance; // per point, kInf beyond max_eps
  std::vector<int> predecessor;      // per point, -1 where undefined
};

/// OPTICS over the rows of `points` (Euclidean). The core distance counts
/// the point itself among its min_pts neighbours.
ReachabilityOrdering optics(const Eigen::MatrixXd& points, int min_pts = 5, double max_eps = kInf);

/// Nested clusters found by the xi-steepness method, as inclusive ranges of
/// the ordering, smaller clusters first.
struct XiRange {
  int start = 0;
  int end = 0;
  bool operator==(const XiRange&) const = default;
};
std::vector<XiRange> xi_ranges(const ReachabilityOrdering& r, double xi, int min_pts, int min_cluster_size = -1,
                               bool predecessor_correction = true);

/// Flat labels (-1 = noise) from the ranges: each range is labelled unless it
/// overlaps an already labelled one.
std::vector<int> xi_labels(const ReachabilityOrdering& r, const std::vector<XiRange>& ranges);

/// Flat cut of the xi hierarchy. Starting from the whole ordering, a cluster
/// is replaced by its maximal sub-clusters when there are at least two and
/// every barrier between neighbours is significant: the mean reachability
/// inside both neighbours is at most `significance` times the highest
/// reachability between them. Returns disjoint ranges in ordering order.
std::vector<XiRange> significant_ranges(const ReachabilityOrdering& r, const std::vector<XiRange>& ranges,
                                        double significance = 0.75);

/// Flat labels from disjoint ranges, numbered in ordering order.
std::vector<int> range_labels(const ReachabilityOrdering& r, const std::vector<XiRange>& disjoint);

/// Columnwise z-scores (population sd); constant columns become 0.
Eigen::MatrixXd zscore(const Eigen::MatrixXd& points);

}  // namespace adaptifont::analysis
