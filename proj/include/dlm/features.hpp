#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dlm/classlabel.hpp"
#include "dlm/common.hpp"

namespace dlm {

class GitRepository;
class VersionTimeline;
struct CommitRecord;

enum class FeatureKind { product, process };

/// Metrics this build knows how to compute. A catalog selects and orders them.
enum class Metric {
  loc,
  loc_no_comment,
  loc_added,
  max_loc_added,
  avg_loc_added,
  loc_deleted,
  churn,
  max_churn,
  avg_churn,
  revisions,
  authors,
  avg_changeset,
  max_changeset,
  age_weeks,
  weighted_age_weeks,
  fix_count,
  cochanged_files,
};

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::process;
  std::string description;
  Metric metric = Metric::loc;
};

class FeatureCatalog {
public:
  FeatureCatalog() = default;
  explicit FeatureCatalog(std::vector<FeatureSpec> entries);

  /// The built-in 17-feature size/churn/history catalog.
  static const FeatureCatalog& standard();
  /// Reads `name,kind,description`; every name must be a known metric name.
  static FeatureCatalog from_csv(std::string_view text);

  std::size_t size() const { return entries_.size(); }
  std::span<const FeatureSpec> entries() const { return entries_; }
  std::vector<std::string> names() const;

private:
  std::vector<FeatureSpec> entries_;
};

struct FeatureRow {
  ClassVersionKey key;
  Eigen::VectorXd values;
  bool defective = false;
};

/// Lines in a source text (a final line without a newline still counts).
int count_lines(std::string_view text);
/// Lines carrying something besides whitespace and C/Java comments.
int count_code_lines(std::string_view text);

/// Everything needed to compute one version's features without a repository.
struct VersionSlice {
  VersionIndex version = 0;
  std::optional<Timestamp> interval_start;  // exclusive; nullopt for version 1
  Timestamp release_date;
  std::map<std::string, std::string> contents;  // class path -> snapshot text
};

/// Feature rows for every class in `slice.contents`, ordered by path.
/// Interval metrics use commits in (interval_start, release_date]; age uses
/// the class's first commit at or before release_date. `fix_commits` holds the
/// ids of linked defect-fix commits.
std::vector<FeatureRow> compute_features(const VersionSlice& slice, std::span<const CommitRecord> commits,
                                         const std::set<std::string>& fix_commits, const FeatureCatalog& catalog);

/// Loads the version's snapshot from the repository and computes its rows.
std::vector<FeatureRow> compute_features(const GitRepository& repo, std::span<const CommitRecord> commits,
                                         const VersionTimeline& timeline, VersionIndex version,
                                         const FeatureCatalog& catalog, const std::set<std::string>& fix_commits,
                                         const ExtensionFilter& filter);

/// Versions kept after dropping the newest half: floor(n / 2).
std::size_t retained_versions(std::size_t version_count);

/// A P_M_R dataset: rows for versions 1..R labeled by one method.
struct Dataset {
  std::string method;
  VersionIndex release = 0;
  std::vector<std::string> feature_names;
  std::vector<FeatureRow> rows;

  Eigen::MatrixXd design_matrix() const;
  Eigen::VectorXd labels() const;
};

/// Rows of versions 1..R from `feature_rows` (sorted by version, path)
/// labeled by `matrix`. Throws Error when R is outside 1..retained.
Dataset build_dataset(std::span<const FeatureRow> feature_rows, const FeatureCatalog& catalog,
                      const DefectivenessMatrix& matrix, VersionIndex release, std::size_t retained);

}  // namespace dlm
