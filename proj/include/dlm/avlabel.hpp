#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dlm/common.hpp"

namespace dlm {

struct DefectLifecycle;

/// The ten affected-version labeling methods, in reporting order.
enum class Method {
  simple,
  proportion_coldstart,
  proportion_increment,
  proportion_movingwindow,
  szz_b,
  szz_u,
  szz_ra,
  szz_b_plus,
  szz_u_plus,
  szz_ra_plus,
};

inline constexpr Method kAllMethods[] = {
    Method::simple,  Method::proportion_coldstart, Method::proportion_increment, Method::proportion_movingwindow,
    Method::szz_b,   Method::szz_u,                Method::szz_ra,               Method::szz_b_plus,
    Method::szz_u_plus, Method::szz_ra_plus,
};

/// Label used for the developer-provided ground truth in outputs.
inline constexpr std::string_view kActual = "Actual";

std::string_view method_name(Method m);
/// Accepts the canonical names (`Simple`, `Proportion_Increment`, `SZZ_B+`, ...)
/// case-insensitively. Throws Error for unknown names.
Method parse_method(std::string_view name);

enum class EstimateSource { coldstart, increment, window, constant };

std::string_view estimate_source_name(EstimateSource s);

struct ProportionEstimate {
  double value = 0.0;
  EstimateSource source = EstimateSource::coldstart;
  std::size_t support = 0;  // defects averaged
};

/// Affected flags for versions 1..fv of one defect under one method.
class AffectedLabeling {
public:
  AffectedLabeling() = default;
  AffectedLabeling(std::string issue_key, std::string method, std::vector<bool> affected);

  const std::string& issue_key() const { return issue_key_; }
  const std::string& method() const { return method_; }
  VersionIndex fv() const { return static_cast<VersionIndex>(affected_.size()); }
  /// 1-based; versions past fv are not affected.
  bool affected(VersionIndex v) const;
  const std::vector<bool>& flags() const { return affected_; }
  std::vector<VersionIndex> affected_versions() const;

  friend bool operator==(const AffectedLabeling&, const AffectedLabeling&) = default;

private:
  std::string issue_key_;
  std::string method_;
  std::vector<bool> affected_;
};

/// P = (fv - iv) / max(fv - ov, 1). Requires ground truth.
double proportion_of_defect(const DefectLifecycle& defect);

/// Median of the other projects' mean P (mean of the two central values for
/// an even count). Throws Error("coldstart unavailable") with no other project.
ProportionEstimate coldstart_p(const std::map<std::string, double>& per_project_averages,
                               const std::string& target);

inline constexpr std::size_t kIncrementMinSupport = 5;

/// Mean P of the defects fixed in versions 1..R-1, or `fallback` when fewer
/// than five such defects exist.
ProportionEstimate increment_p(std::span<const double> prior_proportions, const ProportionEstimate& fallback);

/// Window size for the moving-window estimator: max(1, ceil(1% of total)).
std::size_t window_size(std::size_t total_fixed);

/// Mean P of the last window_size(total_fixed) priors (ordered by fix date),
/// or `fallback` when fewer priors exist.
ProportionEstimate window_p(std::span<const double> ordered_prior_proportions, std::size_t total_fixed,
                            const ProportionEstimate& fallback);

/// IV = fv - max(fv - ov, 1) * p. Fractional and possibly below 1.
double estimate_iv(VersionIndex fv, VersionIndex ov, double p);

/// affected[v] = iv <= v < fv for v in 1..fv; no rounding of iv.
std::vector<bool> label_versions(double iv, VersionIndex fv);

AffectedLabeling simple_labeling(const DefectLifecycle& defect);

/// Labels [szz_iv, fv); an absent IV (no introducing commits) labels nothing.
AffectedLabeling szz_labeling(const DefectLifecycle& defect, std::optional<VersionIndex> szz_iv,
                              std::string method = "SZZ");

AffectedLabeling proportion_labeling(const DefectLifecycle& defect, const ProportionEstimate& p,
                                     std::string method);

/// Element-wise OR. Throws Error on a length or defect mismatch.
AffectedLabeling merge_plus(const AffectedLabeling& szz, const AffectedLabeling& simple, std::string method);

/// Labels [ground-truth IV, fv). Throws Error for unusable defects.
AffectedLabeling ground_truth_labeling(const DefectLifecycle& defect);

/// Per-defect SZZ IVs for one SZZ source. A defect missing from the map has no
/// introducing commits.
using SzzIvMap = std::map<std::string, std::optional<VersionIndex>>;

struct LabelingInputs {
  ProportionEstimate coldstart;
  std::optional<SzzIvMap> szz_b;
  std::optional<SzzIvMap> szz_u;
  std::optional<SzzIvMap> szz_ra;
};

/// Per-defect estimates the proportion methods used, aligned with the input.
struct ProportionTrace {
  std::vector<ProportionEstimate> increment;
  std::vector<ProportionEstimate> window;
};

/// Increment and moving-window estimates for defects ordered by fix date.
/// All defects must carry consistent ground truth.
ProportionTrace trace_proportions(std::span<const DefectLifecycle> ordered_defects,
                                  const ProportionEstimate& fallback);

/// Whether `m` can run given the inputs (SZZ methods need their IV map).
bool method_available(Method m, const LabelingInputs& inputs);

/// Applies `methods` to defects ordered by fix date. Unavailable methods are
/// absent from the result.
std::map<Method, std::vector<AffectedLabeling>> label_defects(std::span<const DefectLifecycle> ordered_defects,
                                                              std::span<const Method> methods,
                                                              const LabelingInputs& inputs);

}  // namespace dlm
