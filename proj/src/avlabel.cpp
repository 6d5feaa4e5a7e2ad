#include "dlm/avlabel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dlm/lifecycle.hpp"

namespace dlm {

namespace {

constexpr std::pair<Method, std::string_view> kMethodNames[] = {
    {Method::simple, "Simple"},
    {Method::proportion_coldstart, "Proportion_ColdStart"},
    {Method::proportion_increment, "Proportion_Increment"},
    {Method::proportion_movingwindow, "Proportion_MovingWindow"},
    {Method::szz_b, "SZZ_B"},
    {Method::szz_u, "SZZ_U"},
    {Method::szz_ra, "SZZ_RA"},
    {Method::szz_b_plus, "SZZ_B+"},
    {Method::szz_u_plus, "SZZ_U+"},
    {Method::szz_ra_plus, "SZZ_RA+"},
};

double mean(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace

std::string_view method_name(Method m) {
  for (const auto& [method, name] : kMethodNames) {
    if (method == m) return name;
  }
  return "?";
}

Method parse_method(std::string_view name) {
  const auto wanted = to_lower(trim(name));
  for (const auto& [method, canonical] : kMethodNames) {
    if (to_lower(canonical) == wanted) return method;
  }
  throw Error("unknown labeling method '" + std::string(name) + "'");
}

std::string_view estimate_source_name(EstimateSource s) {
  switch (s) {
    case EstimateSource::coldstart: return "coldstart";
    case EstimateSource::increment: return "increment";
    case EstimateSource::window: return "window";
    case EstimateSource::constant: return "constant";
  }
  return "?";
}

AffectedLabeling::AffectedLabeling(std::string issue_key, std::string method, std::vector<bool> affected)
    : issue_key_(std::move(issue_key)), method_(std::move(method)), affected_(std::move(affected)) {}

bool AffectedLabeling::affected(VersionIndex v) const {
  if (v < 1 || v > fv()) return false;
  return affected_[static_cast<std::size_t>(v - 1)];
}

std::vector<VersionIndex> AffectedLabeling::affected_versions() const {
  std::vector<VersionIndex> out;
  for (std::size_t i = 0; i < affected_.size(); ++i) {
    if (affected_[i]) out.push_back(static_cast<VersionIndex>(i + 1));
  }
  return out;
}

double proportion_of_defect(const DefectLifecycle& defect) {
  const auto iv = defect.ground_truth_iv();
  if (!iv) {
    throw Error(defect.issue_key + ": proportion needs a ground-truth IV");
  }
  const int denominator = std::max(defect.fv - defect.ov, 1);
  return static_cast<double>(defect.fv - *iv) / static_cast<double>(denominator);
}

ProportionEstimate coldstart_p(const std::map<std::string, double>& per_project_averages,
                               const std::string& target) {
  std::vector<double> others;
  for (const auto& [project, p] : per_project_averages) {
    if (project != target) others.push_back(p);
  }
  if (others.empty()) {
    throw Error("coldstart unavailable: no other project for " + target);
  }
  std::sort(others.begin(), others.end());
  const std::size_t n = others.size();
  const double median = n % 2 ? others[n / 2] : (others[n / 2 - 1] + others[n / 2]) / 2.0;
  return {median, EstimateSource::coldstart, n};
}

ProportionEstimate increment_p(std::span<const double> prior_proportions, const ProportionEstimate& fallback) {
  if (prior_proportions.size() < kIncrementMinSupport) return fallback;
  return {mean(prior_proportions), EstimateSource::increment, prior_proportions.size()};
}

std::size_t window_size(std::size_t total_fixed) {
  // ceil(total / 100) in integers
  return std::max<std::size_t>(1, (total_fixed + 99) / 100);
}

ProportionEstimate window_p(std::span<const double> ordered_prior_proportions, std::size_t total_fixed,
                            const ProportionEstimate& fallback) {
  const std::size_t w = window_size(total_fixed);
  if (ordered_prior_proportions.size() < w) return fallback;
  return {mean(ordered_prior_proportions.last(w)), EstimateSource::window, w};
}

double estimate_iv(VersionIndex fv, VersionIndex ov, double p) {
  const int span = std::max(fv - ov, 1);
  return static_cast<double>(fv) - static_cast<double>(span) * p;
}

std::vector<bool> label_versions(double iv, VersionIndex fv) {
  std::vector<bool> affected(static_cast<std::size_t>(std::max(fv, 0)), false);
  for (VersionIndex v = 1; v < fv; ++v) {
    affected[static_cast<std::size_t>(v - 1)] = static_cast<double>(v) >= iv;
  }
  return affected;
}

AffectedLabeling simple_labeling(const DefectLifecycle& defect) {
  return {defect.issue_key, std::string(method_name(Method::simple)),
          label_versions(static_cast<double>(defect.ov), defect.fv)};
}

AffectedLabeling szz_labeling(const DefectLifecycle& defect, std::optional<VersionIndex> szz_iv, std::string method) {
  if (!szz_iv) {
    return {defect.issue_key, std::move(method), std::vector<bool>(static_cast<std::size_t>(defect.fv), false)};
  }
  return {defect.issue_key, std::move(method), label_versions(static_cast<double>(*szz_iv), defect.fv)};
}

AffectedLabeling proportion_labeling(const DefectLifecycle& defect, const ProportionEstimate& p, std::string method) {
  return {defect.issue_key, std::move(method), label_versions(estimate_iv(defect.fv, defect.ov, p.value), defect.fv)};
}

AffectedLabeling merge_plus(const AffectedLabeling& szz, const AffectedLabeling& simple, std::string method) {
  if (szz.issue_key() != simple.issue_key() || szz.fv() != simple.fv()) {
    throw Error("merge_plus: labelings of " + szz.issue_key() + " and " + simple.issue_key() + " do not align");
  }
  std::vector<bool> merged(szz.flags().size());
  for (std::size_t i = 0; i < merged.size(); ++i) merged[i] = szz.flags()[i] || simple.flags()[i];
  return {szz.issue_key(), std::move(method), std::move(merged)};
}

AffectedLabeling ground_truth_labeling(const DefectLifecycle& defect) {
  if (!usability(defect).consistent) {
    throw Error(defect.issue_key + ": ground truth is unavailable or inconsistent");
  }
  return {defect.issue_key, std::string(kActual),
          label_versions(static_cast<double>(*defect.ground_truth_iv()), defect.fv)};
}

ProportionTrace trace_proportions(std::span<const DefectLifecycle> ordered_defects,
                                  const ProportionEstimate& fallback) {
  ProportionTrace trace;
  std::vector<double> proportions;
  proportions.reserve(ordered_defects.size());
  for (const auto& d : ordered_defects) proportions.push_back(proportion_of_defect(d));
  const std::size_t total = ordered_defects.size();

  for (std::size_t i = 0; i < ordered_defects.size(); ++i) {
    const VersionIndex release = ordered_defects[i].fv;
    std::vector<double> fixed_before;
    for (std::size_t j = 0; j < ordered_defects.size(); ++j) {
      if (ordered_defects[j].fv < release) fixed_before.push_back(proportions[j]);
    }
    trace.increment.push_back(increment_p(fixed_before, fallback));
    trace.window.push_back(window_p(std::span<const double>(proportions).first(i), total, fallback));
  }
  return trace;
}

bool method_available(Method m, const LabelingInputs& inputs) {
  switch (m) {
    case Method::szz_b:
    case Method::szz_b_plus: return inputs.szz_b.has_value();
    case Method::szz_u:
    case Method::szz_u_plus: return inputs.szz_u.has_value();
    case Method::szz_ra:
    case Method::szz_ra_plus: return inputs.szz_ra.has_value();
    default: return true;
  }
}

std::map<Method, std::vector<AffectedLabeling>> label_defects(std::span<const DefectLifecycle> ordered_defects,
                                                              std::span<const Method> methods,
                                                              const LabelingInputs& inputs) {
  const bool needs_trace = std::any_of(methods.begin(), methods.end(), [](Method m) {
    return m == Method::proportion_increment || m == Method::proportion_movingwindow;
  });
  ProportionTrace trace;
  if (needs_trace) trace = trace_proportions(ordered_defects, inputs.coldstart);

  auto szz_iv_of = [](const SzzIvMap& ivs, const std::string& key) -> std::optional<VersionIndex> {
    auto it = ivs.find(key);
    return it == ivs.end() ? std::nullopt : it->second;
  };
  auto szz_map_for = [&](Method m) -> const SzzIvMap& {
    switch (m) {
      case Method::szz_b:
      case Method::szz_b_plus: return *inputs.szz_b;
      case Method::szz_u:
      case Method::szz_u_plus: return *inputs.szz_u;
      default: return *inputs.szz_ra;
    }
  };

  std::map<Method, std::vector<AffectedLabeling>> result;
  for (const Method m : methods) {
    if (!method_available(m, inputs)) continue;
    const std::string name(method_name(m));
    auto& out = result[m];
    out.reserve(ordered_defects.size());
    for (std::size_t i = 0; i < ordered_defects.size(); ++i) {
      const auto& d = ordered_defects[i];
      switch (m) {
        case Method::simple: out.push_back(simple_labeling(d)); break;
        case Method::proportion_coldstart: out.push_back(proportion_labeling(d, inputs.coldstart, name)); break;
        case Method::proportion_increment: out.push_back(proportion_labeling(d, trace.increment[i], name)); break;
        case Method::proportion_movingwindow: out.push_back(proportion_labeling(d, trace.window[i], name)); break;
        case Method::szz_b:
        case Method::szz_u:
        case Method::szz_ra: out.push_back(szz_labeling(d, szz_iv_of(szz_map_for(m), d.issue_key), name)); break;
        case Method::szz_b_plus:
        case Method::szz_u_plus:
        case Method::szz_ra_plus:
          out.push_back(merge_plus(szz_labeling(d, szz_iv_of(szz_map_for(m), d.issue_key)), simple_labeling(d), name));
          break;
      }
    }
  }
  return result;
}

}  // namespace dlm
