#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dlm/common.hpp"
#include "dlm/evalstats.hpp"

namespace dlm {

struct Dataset;

/// |r| <= 1 everywhere; feature_corr has a unit diagonal.
struct CorrelationProfile {
  Eigen::VectorXd class_corr;
  Eigen::MatrixXd feature_corr;
};

/// Pearson correlation of every column of `x` with `y` and with each other.
/// Columns (or a label vector) with zero variance correlate 0 with everything.
template <typename DerivedX, typename DerivedY>
CorrelationProfile correlations(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  if (x.rows() < 2) throw Error("correlations need at least two rows, got " + std::to_string(x.rows()));
  if (y.size() != x.rows()) throw Error("correlations: label length differs from row count");

  const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  const Eigen::VectorXd x_norm = xc.colwise().norm().transpose();
  const double y_norm = yc.norm();

  const Eigen::Index k = x.cols();
  CorrelationProfile p;
  p.class_corr = Eigen::VectorXd::Zero(k);
  p.feature_corr = Eigen::MatrixXd::Identity(k, k);
  const Eigen::VectorXd xy = xc.transpose() * yc;
  const Eigen::MatrixXd xx = xc.transpose() * xc;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (x_norm[i] > 0.0 && y_norm > 0.0) {
      p.class_corr[i] = std::clamp(xy[i] / (x_norm[i] * y_norm), -1.0, 1.0);
    }
    for (Eigen::Index j = i + 1; j < k; ++j) {
      double r = 0.0;
      if (x_norm[i] > 0.0 && x_norm[j] > 0.0) r = std::clamp(xx(i, j) / (x_norm[i] * x_norm[j]), -1.0, 1.0);
      p.feature_corr(i, j) = p.feature_corr(j, i) = r;
    }
  }
  return p;
}

CorrelationProfile correlations(const Dataset& dataset);

/// CFS merit of the features in `subset` (column indices):
/// sum |r_cf| / sqrt(k + 2 * sum_{i<j} |r_ff|). Empty subset -> 0.
double cfs_merit(std::span<const int> subset, const CorrelationProfile& profile);

struct SelectionResult {
  std::string dataset_id;
  std::vector<std::string> selected;  // sorted by name
  double merit = 0.0;
};

inline constexpr int kDefaultSubsetLimit = 20;
/// Relative gap below which two merits count as tied.
inline constexpr double kMeritTieTolerance = 1e-12;

/// Enumerates every non-empty subset of columns and keeps the best merit;
/// ties go to the smaller subset, then to the lexicographically smaller list
/// of sorted names. When no subset has positive merit the result is empty.
/// Throws Error when there are more than `limit` features.
SelectionResult exhaustive_search(const CorrelationProfile& profile, std::span<const std::string> names,
                                  int jobs = 1, int limit = kDefaultSubsetLimit);

SelectionResult exhaustive_search(const Dataset& dataset, int jobs = 1, int limit = kDefaultSubsetLimit);

/// Confusion of a method's selected set against the ground-truth selection
/// over the whole catalog. Throws Error if a name is not in the catalog.
ConfusionCounts selection_confusion(std::span<const std::string> method_selected,
                                    std::span<const std::string> actual_selected,
                                    std::span<const std::string> catalog);

/// Fraction of results selecting each catalog feature.
std::map<std::string, double> selection_frequency(std::span<const SelectionResult> results,
                                                  std::span<const std::string> catalog);

}  // namespace dlm
