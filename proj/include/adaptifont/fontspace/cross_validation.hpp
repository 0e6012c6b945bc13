#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "adaptifont/fontspace/nmf.hpp"
#include "adaptifont/json_io.hpp"

namespace adaptifont::fontspace {

struct CvReport {
  std::vector<int> ks;
  int n_holdouts = 0;
  /// errors[ki][h]: held-out Frobenius error of component count ks[ki] on holdout h
  std::vector<std::vector<double>> errors;
  std::vector<double> mean;
  std::vector<double> sd;

  int best_k() const;
  bool operator==(const CvReport&) const = default;
};

struct CvOptions {
  int k_min = 1;
  int k_max = 5;
  int n_holdouts = 10;
  std::uint64_t seed = 0;
  NmfOptions nmf;  // its seed is ignored; fits are seeded from `seed`
};

CvReport cross_validate(const Eigen::MatrixXd& X, const CvOptions& opts);

Json cv_report_to_json(const CvReport& report);

}  // namespace adaptifont::fontspace
