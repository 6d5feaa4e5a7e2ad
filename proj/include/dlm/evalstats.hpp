#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dlm {

struct ConfusionCounts {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Element-wise tally; throws Error when the lengths differ.
ConfusionCounts confusion(const std::vector<bool>& predicted, const std::vector<bool>& actual);

/// nullopt marks a metric whose denominator is zero.
struct AccuracyReport {
  std::optional<double> precision, recall, f1, kappa, mcc;
  std::optional<double> observed, expected;
};

AccuracyReport accuracy_metrics(const ConfusionCounts& c);

struct KruskalWallisResult {
  double h = 0.0;
  double p = 1.0;
  int dof = 0;
};

/// H with average ranks and tie correction; p from chi-squared(k - 1).
/// Throws Error with fewer than two groups or an empty group.
KruskalWallisResult kruskal_wallis(std::span<const std::vector<double>> groups);

struct PairwiseComparison {
  std::size_t first = 0, second = 0;
  double z = 0.0;
  double p = 1.0;           // two-sided, unadjusted
  double p_adjusted = 1.0;  // Holm step-down, capped at 1
};

/// Dunn's test on pooled ranks for every pair (i < j), in (i, j) order.
std::vector<PairwiseComparison> dunn_posthoc(std::span<const std::vector<double>> groups);

/// Holm step-down adjustment, returned in input order.
std::vector<double> holm_adjust(std::span<const double> p_values);

/// Unordered pairs of methods whose difference is significant.
class SignificanceMap {
public:
  void mark(const std::string& a, const std::string& b);
  bool significant(const std::string& a, const std::string& b) const;
  std::size_t size() const { return pairs_.size(); }

private:
  std::set<std::pair<std::string, std::string>> pairs_;
};

struct RankRow {
  std::string method;
  double mean = 0.0;
  double rank = 1.0;
  std::string comment;
};

using RankTable = std::vector<RankRow>;

/// Sorts by mean (descending, stable) and walks the list keeping a group of
/// methods at the current integer rank. A method not significantly different
/// from any group member joins the group; one differing from exactly one
/// member of a larger group gets rank + 0.5 and stays outside the group;
/// anything else opens the next integer rank.
RankTable rank_methods(std::span<const std::pair<std::string, double>> means, const SignificanceMap& sig);

}  // namespace dlm
