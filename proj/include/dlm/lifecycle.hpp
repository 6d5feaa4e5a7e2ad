#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dlm/common.hpp"

namespace dlm {

struct IssueRecord;
struct IssueCommitLink;
class CommitIndex;

struct RawVersion {
  std::string name;
  std::optional<Timestamp> release_date;
  bool released = true;
};

struct Release {
  std::string name;
  VersionIndex index = 0;
  Timestamp release_date;
};

/// Released versions numbered 1..n from the oldest. This is the coordinate
/// system every IV/OV/FV lives in.
class VersionTimeline {
public:
  VersionTimeline() = default;
  explicit VersionTimeline(std::vector<Release> releases);

  std::size_t size() const { return releases_.size(); }
  bool empty() const { return releases_.empty(); }
  std::span<const Release> releases() const { return releases_; }
  const Release& at(VersionIndex index) const;
  std::optional<VersionIndex> index_of(std::string_view name) const;

  /// Smallest index whose release date is >= t (the release that first ships
  /// a change made at t); nullopt when t is after the last release.
  std::optional<VersionIndex> version_of_timestamp(Timestamp t) const;

  /// Largest index whose release date is <= t, clamped to 1 when t predates
  /// every release (the release a reporter at time t was running).
  VersionIndex current_version_at(Timestamp t) const;

private:
  std::vector<Release> releases_;
  std::map<std::string, VersionIndex, std::less<>> name_index_;
};

/// Keeps released, dated versions whose names match none of the exclusion
/// globs (fnmatch syntax), ordered by date with ties broken by name.
/// Throws Error when nothing usable remains.
VersionTimeline build_timeline(std::span<const RawVersion> raw_versions,
                               std::span<const std::string> exclusion_patterns = {});

/// Versions from a CSV with columns `name,release_date,released`.
std::vector<RawVersion> parse_versions_csv(std::string_view text);
/// Versions from a tracker version array: `[{"name", "releaseDate", "released"}]`.
std::vector<RawVersion> parse_versions_json(std::string_view text);

struct DefectLifecycle {
  std::string issue_key;
  VersionIndex ov = 0;
  VersionIndex fv = 0;
  std::vector<std::string> fix_commits;  // ascending (timestamp, id); last is the fix
  Timestamp fix_timestamp;
  Timestamp created;
  std::vector<VersionIndex> ground_truth_avs;  // sorted, unique; empty when unavailable

  std::optional<VersionIndex> ground_truth_iv() const {
    if (ground_truth_avs.empty()) return std::nullopt;
    return ground_truth_avs.front();
  }
};

/// OV is the release current at ticket creation, FV the release shipping the
/// last linked commit, ground-truth AVs the tracker's AV names present in the
/// timeline. Throws Excluded for an unlinked defect or a fix after the last
/// release ("unreleased fix").
DefectLifecycle derive_lifecycle(const IssueRecord& issue, const IssueCommitLink& link,
                                 const CommitIndex& commits, const VersionTimeline& timeline);

struct AvUsability {
  bool available = false;
  bool consistent = false;
};

AvUsability usability(const DefectLifecycle& defect);

/// False (drop) when the tracker says the defect was injected in its fixing
/// version. Defects without ground truth are kept.
bool post_release_filter(const DefectLifecycle& defect);

/// Sorts defects by (fix timestamp, issue key), the order estimators consume.
void order_by_fix_date(std::vector<DefectLifecycle>& defects);

struct ProjectDefects {
  std::string project;
  std::size_t fixed_defects = 0;  // tracker count before linking
  std::size_t version_count = 0;
  std::vector<DefectLifecycle> defects;  // linked, post-release
};

struct Rq1Row {
  std::string project;
  std::size_t defects = 0;
  std::size_t linked = 0;
  std::size_t available = 0;
  std::size_t consistent = 0;  // available and consistent
  std::size_t version_count = 0;
  std::optional<double> pct_available;   // undefined when linked == 0
  std::optional<double> pct_consistent;

  std::size_t unusable() const { return linked - consistent; }
};

struct Rq1Summary {
  std::vector<Rq1Row> projects;
  Rq1Row totals;
};

Rq1Summary rq1_summary(std::span<const ProjectDefects> projects);

struct SelectionThresholds {
  std::size_t min_usable_defects = 100;
  std::size_t min_versions = 6;
  double min_pct_consistent = 50.0;
};

/// Why a project fails the thresholds; empty when it passes.
std::vector<std::string> selection_failures(const Rq1Row& row, const SelectionThresholds& t = {});

std::vector<std::string> select_projects(std::span<const Rq1Row> summaries,
                                         const SelectionThresholds& t = {});

}  // namespace dlm
