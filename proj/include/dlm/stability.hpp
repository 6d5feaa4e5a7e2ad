#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dlm/lifecycle.hpp"

namespace dlm {

/// Sample (n - 1) standard deviation; nullopt for fewer than two values.
std::optional<double> sample_stdev(std::span<const double> values);

struct StabilityRow {
  std::string project;
  std::size_t defects = 0;  // consistent defects measured
  std::optional<double> iv, ov, fv, p;
};

struct StabilityReport {
  std::vector<StabilityRow> projects;
  StabilityRow across;  // every consistent defect of every project pooled
  std::optional<double> median_within_p;
};

/// Spread of IV, OV, FV and P over each project's consistent defects.
/// Throws Error when no project has a consistent defect.
StabilityReport stability_report(std::span<const ProjectDefects> projects);

}  // namespace dlm
