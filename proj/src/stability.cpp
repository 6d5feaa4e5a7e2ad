#include "dlm/stability.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "dlm/avlabel.hpp"

namespace dlm {

std::optional<double> sample_stdev(std::span<const double> values) {
  if (values.size() < 2) return std::nullopt;
  const Eigen::Map<const Eigen::ArrayXd> x(values.data(), static_cast<Eigen::Index>(values.size()));
  const double var = (x - x.mean()).square().sum() / static_cast<double>(values.size() - 1);
  return std::sqrt(var);
}

namespace {

struct Columns {
  std::vector<double> iv, ov, fv, p;

  void add(const DefectLifecycle& d) {
    iv.push_back(*d.ground_truth_iv());
    ov.push_back(d.ov);
    fv.push_back(d.fv);
    p.push_back(proportion_of_defect(d));
  }

  StabilityRow row(std::string project) const {
    return {std::move(project), p.size(), sample_stdev(iv), sample_stdev(ov), sample_stdev(fv), sample_stdev(p)};
  }
};

}  // namespace

StabilityReport stability_report(std::span<const ProjectDefects> projects) {
  StabilityReport report;
  Columns pooled;
  std::vector<double> within_p;
  for (const auto& project : projects) {
    Columns cols;
    for (const auto& d : project.defects) {
      if (!usability(d).consistent) continue;
      cols.add(d);
      pooled.add(d);
    }
    report.projects.push_back(cols.row(project.project));
    if (report.projects.back().p) within_p.push_back(*report.projects.back().p);
  }
  if (pooled.p.empty()) throw Error("stability report needs at least one consistent defect");
  report.across = pooled.row("ACROSS");
  if (!within_p.empty()) {
    std::sort(within_p.begin(), within_p.end());
    const std::size_t n = within_p.size();
    report.median_within_p = n % 2 ? within_p[n / 2] : (within_p[n / 2 - 1] + within_p[n / 2]) / 2.0;
  }
  return report;
}

}  // namespace dlm
