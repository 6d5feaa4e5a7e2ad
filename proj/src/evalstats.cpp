#include "dlm/evalstats.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dlm/common.hpp"

namespace dlm {

ConfusionCounts confusion(const std::vector<bool>& predicted, const std::vector<bool>& actual) {
  if (predicted.size() != actual.size()) {
    throw Error("confusion: " + std::to_string(predicted.size()) + " predictions for " +
                std::to_string(actual.size()) + " labels");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i]) (actual[i] ? c.tp : c.fp)++;
    else (actual[i] ? c.fn : c.tn)++;
  }
  return c;
}

AccuracyReport accuracy_metrics(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn), tn = static_cast<double>(c.tn);
  const double n = tp + fp + fn + tn;
  AccuracyReport r;
  if (tp + fp > 0) r.precision = tp / (tp + fp);
  if (tp + fn > 0) r.recall = tp / (tp + fn);
  if (2 * tp + fp + fn > 0) r.f1 = 2 * tp / (2 * tp + fp + fn);
  if (n > 0) {
    r.observed = (tp + tn) / n;
    const double p_yes = (tp + fp) / n * ((tp + fn) / n);
    const double p_no = (tn + fp) / n * ((tn + fn) / n);
    r.expected = p_yes + p_no;
    if (*r.expected != 1.0) r.kappa = (*r.observed - *r.expected) / (1.0 - *r.expected);
  }
  // Pairing the marginals this way keeps MCC bit-identical when the positive
  // and negative labels are swapped.
  const double mcc_den = ((tp + fp) * (tn + fn)) * ((tp + fn) * (tn + fp));
  if (mcc_den > 0) r.mcc = (tp * tn - fp * fn) / std::sqrt(mcc_den);
  return r;
}

namespace {

struct PooledRanks {
  std::vector<Eigen::VectorXd> ranks;  // per group
  double n = 0;
  double tie_sum = 0;  // sum of t^3 - t over tie blocks
};

PooledRanks pooled_ranks(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw Error("rank test needs at least two groups");
  std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> pooled;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw Error("rank test: group " + std::to_string(g) + " is empty");
    for (std::size_t i = 0; i < groups[g].size(); ++i) {
      if (!std::isfinite(groups[g][i])) throw Error("rank test: non-finite observation");
      pooled.push_back({groups[g][i], {g, i}});
    }
  }
  std::sort(pooled.begin(), pooled.end());

  PooledRanks out;
  out.n = static_cast<double>(pooled.size());
  for (const auto& g : groups) out.ranks.emplace_back(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < pooled.size();) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
    const double t = static_cast<double>(j - i);
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      const auto [g, idx] = pooled[k].second;
      out.ranks[g][static_cast<Eigen::Index>(idx)] = avg;
    }
    out.tie_sum += t * t * t - t;
    i = j;
  }
  return out;
}

}  // namespace

KruskalWallisResult kruskal_wallis(std::span<const std::vector<double>> groups) {
  const PooledRanks pr = pooled_ranks(groups);
  KruskalWallisResult result;
  result.dof = static_cast<int>(groups.size()) - 1;
  const double n = pr.n;
  const double correction = 1.0 - pr.tie_sum / (n * n * n - n);
  if (correction <= 0.0) return result;  // every observation identical

  double sum = 0.0;
  for (const auto& r : pr.ranks) sum += r.sum() * r.sum() / static_cast<double>(r.size());
  const double h = (12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0)) / correction;
  result.h = std::max(h, 0.0);
  const boost::math::chi_squared dist(result.dof);
  result.p = boost::math::cdf(boost::math::complement(dist, result.h));
  return result;
}

std::vector<double> holm_adjust(std::span<const double> p_values) {
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double scaled = std::min(1.0, static_cast<double>(m - k) * p_values[order[k]]);
    running = std::max(running, scaled);
    adjusted[order[k]] = running;
  }
  return adjusted;
}

std::vector<PairwiseComparison> dunn_posthoc(std::span<const std::vector<double>> groups) {
  const PooledRanks pr = pooled_ranks(groups);
  const double n = pr.n;
  const double variance_base = n * (n + 1.0) / 12.0 - pr.tie_sum / (12.0 * (n - 1.0));

  std::vector<PairwiseComparison> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      PairwiseComparison c{i, j};
      const double ni = static_cast<double>(pr.ranks[i].size());
      const double nj = static_cast<double>(pr.ranks[j].size());
      const double se = std::sqrt(variance_base * (1.0 / ni + 1.0 / nj));
      if (se > 0.0) {
        c.z = (pr.ranks[i].mean() - pr.ranks[j].mean()) / se;
        c.p = std::erfc(std::abs(c.z) / std::sqrt(2.0));
      }
      out.push_back(c);
    }
  }
  std::vector<double> raw;
  for (const auto& c : out) raw.push_back(c.p);
  const auto adjusted = holm_adjust(raw);
  for (std::size_t k = 0; k < out.size(); ++k) out[k].p_adjusted = adjusted[k];
  return out;
}

void SignificanceMap::mark(const std::string& a, const std::string& b) {
  pairs_.insert(std::minmax(a, b));
}

bool SignificanceMap::significant(const std::string& a, const std::string& b) const {
  return pairs_.contains(std::minmax(a, b));
}

RankTable rank_methods(std::span<const std::pair<std::string, double>> means, const SignificanceMap& sig) {
  RankTable table;
  for (const auto& [method, mean] : means) table.push_back({method, mean, 1.0, {}});
  std::stable_sort(table.begin(), table.end(), [](const RankRow& a, const RankRow& b) { return a.mean > b.mean; });

  double current = 1.0;
  std::vector<std::string> group;
  for (auto& row : table) {
    std::vector<std::string> differing;
    for (const auto& member : group) {
      if (sig.significant(row.method, member)) differing.push_back(member);
    }
    if (differing.empty()) {
      row.rank = current;
      group.push_back(row.method);
    } else if (differing.size() == 1 && group.size() > 1) {
      row.rank = current + 0.5;
      row.comment = "Significantly lower than " + differing.front();
    } else {
      current += 1.0;
      row.rank = current;
      group = {row.method};
    }
  }
  return table;
}

}  // namespace dlm
