#include "adaptifont/fontspace/cross_validation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adaptifont/error.hpp"
#include "adaptifont/rng.hpp"

namespace adaptifont::fontspace {

int CvReport::best_k() const {
  if (mean.empty()) throw Error(ErrorCode::kInvalidArgument, "empty CV report");
  const auto it = std::min_element(mean.begin(), mean.end());
  return ks[static_cast<std::size_t>(it - mean.begin())];
}

CvReport cross_validate(const Eigen::MatrixXd& X, const CvOptions& opts) {
  if (opts.k_min < 1 || opts.k_max < opts.k_min) throw Error(ErrorCode::kInvalidArgument, "invalid k range");
  if (opts.n_holdouts < 1) throw Error(ErrorCode::kInvalidArgument, "n_holdouts must be positive");
  if (X.rows() < 4 || X.cols() < 4) throw Error(ErrorCode::kInvalidArgument, "matrix too small for a 4x4 block partition");

  CvReport report;
  report.n_holdouts = opts.n_holdouts;
  for (int k = opts.k_min; k <= opts.k_max; ++k) report.ks.push_back(k);
  report.errors.assign(report.ks.size(), std::vector<double>(static_cast<std::size_t>(opts.n_holdouts), 0.0));

  for (int h = 0; h < opts.n_holdouts; ++h) {
    const HoldoutMask mask = make_wold_holdout(static_cast<int>(X.rows()), static_cast<int>(X.cols()),
                                               derive_seed({opts.seed, static_cast<std::uint64_t>(h)}));
    for (std::size_t ki = 0; ki < report.ks.size(); ++ki) {
      NmfOptions nmf_opts = opts.nmf;
      nmf_opts.seed = derive_seed({opts.seed, static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(report.ks[ki])});
      const Factorization fit = nmf(X, report.ks[ki], &mask, nmf_opts);
      report.errors[ki][static_cast<std::size_t>(h)] = held_out_error(X, fit, mask);
    }
  }

  for (const auto& errs : report.errors) {
    const double m = std::accumulate(errs.begin(), errs.end(), 0.0) / static_cast<double>(errs.size());
    double ss = 0;
    for (double e : errs) ss += (e - m) * (e - m);
    report.mean.push_back(m);
    report.sd.push_back(errs.size() > 1 ? std::sqrt(ss / static_cast<double>(errs.size() - 1)) : 0.0);
  }
  return report;
}

Json cv_report_to_json(const CvReport& report) {
  Json per_k = Json::array();
  for (std::size_t i = 0; i < report.ks.size(); ++i) {
    per_k.push_back({{"k", report.ks[i]},
                     {"errors", report.errors[i]},
                     {"mean", report.mean[i]},
                     {"sd", report.sd[i]}});
  }
  return {{"n_holdouts", report.n_holdouts}, {"per_k", per_k}, {"best_k", report.best_k()}};
}

}  // namespace adaptifont::fontspace
