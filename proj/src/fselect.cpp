#include "dlm/fselect.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "dlm/features.hpp"
#include "dlm/parallel.hpp"

namespace dlm {

CorrelationProfile correlations(const Dataset& dataset) {
  return correlations(dataset.design_matrix(), dataset.labels());
}

double cfs_merit(std::span<const int> subset, const CorrelationProfile& profile) {
  if (subset.empty()) return 0.0;
  double rcf = 0.0, rff = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    rcf += std::abs(profile.class_corr[subset[a]]);
    for (std::size_t b = a + 1; b < subset.size(); ++b) rff += std::abs(profile.feature_corr(subset[a], subset[b]));
  }
  const double denom = std::sqrt(static_cast<double>(subset.size()) + 2.0 * rff);
  return rcf / denom;
}

namespace {

struct Candidate {
  std::uint32_t mask = 0;
  double merit = 0.0;
};

std::vector<std::string> names_of(std::uint32_t mask, std::span<const std::string> names) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (mask >> i & 1U) out.push_back(names[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool tied(double a, double b) {
  return std::abs(a - b) <= kMeritTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

// True when `a` should replace `b` as the incumbent.
bool better(const Candidate& a, const Candidate& b, std::span<const std::string> names) {
  if (b.mask == 0) return a.mask != 0;
  if (!tied(a.merit, b.merit)) return a.merit > b.merit;
  const int ca = std::popcount(a.mask), cb = std::popcount(b.mask);
  if (ca != cb) return ca < cb;
  return names_of(a.mask, names) < names_of(b.mask, names);
}

}  // namespace

SelectionResult exhaustive_search(const CorrelationProfile& profile, std::span<const std::string> names, int jobs,
                                  int limit) {
  const int k = static_cast<int>(names.size());
  if (profile.class_corr.size() != k) throw Error("exhaustive_search: names do not match the profile");
  if (k > limit || k > 30) {
    throw Error("exhaustive search over " + std::to_string(k) + " features exceeds the limit of " +
                std::to_string(limit) + "; heuristic search is not supported");
  }

  const Eigen::VectorXd rcf = profile.class_corr.cwiseAbs();
  const Eigen::MatrixXd rff = profile.feature_corr.cwiseAbs();
  const std::uint32_t total = k == 0 ? 0U : (1U << k) - 1U;

  // Fixed chunking keeps the per-chunk winners independent of the thread count.
  constexpr std::uint32_t kChunk = 4096;
  const std::size_t chunks = total / kChunk + 1;
  std::vector<Candidate> winners(chunks);
  parallel_for(chunks, jobs, [&](std::size_t c) {
    Candidate best;
    const std::uint32_t lo = std::max<std::uint32_t>(1U, static_cast<std::uint32_t>(c) * kChunk);
    const std::uint32_t hi = std::min<std::uint32_t>(total, static_cast<std::uint32_t>(c + 1) * kChunk - 1U);
    int idx[32];
    for (std::uint32_t mask = lo; mask <= hi && mask >= lo; ++mask) {
      int m = 0;
      double sum_cf = 0.0, sum_ff = 0.0;
      for (int i = 0; i < k; ++i) {
        if (!(mask >> i & 1U)) continue;
        sum_cf += rcf[i];
        for (int a = 0; a < m; ++a) sum_ff += rff(idx[a], i);
        idx[m++] = i;
      }
      const Candidate cand{mask, sum_cf / std::sqrt(m + 2.0 * sum_ff)};
      if (cand.merit > 0.0 && better(cand, best, names)) best = cand;
    }
    winners[c] = best;
  });

  Candidate best;
  for (const auto& w : winners) {
    if (w.mask != 0 && better(w, best, names)) best = w;
  }
  SelectionResult result;
  if (best.mask != 0 && best.merit > 0.0) {
    result.selected = names_of(best.mask, names);
    result.merit = best.merit;
  }
  return result;
}

SelectionResult exhaustive_search(const Dataset& dataset, int jobs, int limit) {
  if (static_cast<int>(dataset.feature_names.size()) > limit) {
    throw Error("exhaustive search over " + std::to_string(dataset.feature_names.size()) +
                " features exceeds the limit of " + std::to_string(limit) + "; heuristic search is not supported");
  }
  auto result = exhaustive_search(correlations(dataset), dataset.feature_names, jobs, limit);
  result.dataset_id = dataset.method + "_R" + std::to_string(dataset.release);
  return result;
}

ConfusionCounts selection_confusion(std::span<const std::string> method_selected,
                                    std::span<const std::string> actual_selected,
                                    std::span<const std::string> catalog) {
  const std::set<std::string> all(catalog.begin(), catalog.end());
  const std::set<std::string> method(method_selected.begin(), method_selected.end());
  const std::set<std::string> actual(actual_selected.begin(), actual_selected.end());
  for (const auto* set : {&method, &actual}) {
    for (const auto& name : *set) {
      if (!all.contains(name)) throw Error("selection_confusion: '" + name + "' is not in the catalog");
    }
  }
  ConfusionCounts c;
  for (const auto& name : all) {
    const bool m = method.contains(name), a = actual.contains(name);
    if (m && a) ++c.tp;
    else if (m) ++c.fp;
    else if (a) ++c.fn;
    else ++c.tn;
  }
  return c;
}

std::map<std::string, double> selection_frequency(std::span<const SelectionResult> results,
                                                  std::span<const std::string> catalog) {
  std::map<std::string, double> freq;
  if (results.empty()) return freq;
  for (const auto& name : catalog) freq[name] = 0.0;
  for (const auto& r : results) {
    for (const auto& name : r.selected) freq[name] += 1.0;
  }
  for (auto& [name, f] : freq) f /= static_cast<double>(results.size());
  return freq;
}

}  // namespace dlm
