#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dlm/common.hpp"

namespace dlm {

class AffectedLabeling;
class GitRepository;
class VersionTimeline;
struct CommitRecord;
struct DefectLifecycle;

struct ClassVersionKey {
  VersionIndex version = 0;
  std::string path;

  friend auto operator<=>(const ClassVersionKey&, const ClassVersionKey&) = default;
};

/// Suffix filter deciding which repository paths count as classes.
class ExtensionFilter {
public:
  ExtensionFilter() : extensions_{".java"} {}
  explicit ExtensionFilter(std::vector<std::string> extensions) : extensions_(std::move(extensions)) {}

  bool operator()(std::string_view path) const;
  const std::vector<std::string>& extensions() const { return extensions_; }

private:
  std::vector<std::string> extensions_;
};

using PathSet = std::set<std::string>;
/// Classes present in each version's snapshot.
using ClassUniverse = std::map<VersionIndex, PathSet>;

struct DefectivenessMatrix {
  std::string method;
  std::map<ClassVersionKey, bool> entries;
  std::map<ClassVersionKey, std::set<std::string>> defect_hits;
  std::vector<std::string> warnings;

  bool defective(const ClassVersionKey& key) const {
    auto it = entries.find(key);
    return it != entries.end() && it->second;
  }
};

/// Filtered union of the paths touched by a defect's fix commits.
PathSet touched_classes(std::span<const CommitRecord* const> fix_commits, const ExtensionFilter& filter);

/// Latest commit at or before `release_date` (ties go to the later commit in
/// extraction order).
std::optional<std::string> snapshot_commit(std::span<const CommitRecord> commits, Timestamp release_date);

/// Filtered paths in the version's snapshot; empty (with a warning) when no
/// commit precedes the release.
PathSet class_universe(const GitRepository& repo, std::span<const CommitRecord> commits,
                       const VersionTimeline& timeline, VersionIndex version, const ExtensionFilter& filter);

/// (v, c) is defective when some defect labels v affected and its fix touched
/// c. Keys cover exactly (v, c) with c in universe[v].
DefectivenessMatrix label_classes(std::string method, std::span<const AffectedLabeling> labelings,
                                  const std::map<std::string, PathSet>& touched, const ClassUniverse& universes);

/// Same rule driven by the tracker's own affected versions.
DefectivenessMatrix ground_truth_classes(std::span<const DefectLifecycle> defects,
                                         const std::map<std::string, PathSet>& touched,
                                         const ClassUniverse& universes);

}  // namespace dlm
