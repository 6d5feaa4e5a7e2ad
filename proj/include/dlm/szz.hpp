#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dlm/common.hpp"
#include "dlm/ingest.hpp"

namespace dlm {

class GitRepository;
class VersionTimeline;
struct DefectLifecycle;

enum class SzzSource { basic, imported_u, imported_ra };

std::string_view szz_source_name(SzzSource s);

struct IntroducingCommit {
  std::string id;
  Timestamp timestamp;

  friend bool operator==(const IntroducingCommit&, const IntroducingCommit&) = default;
};

struct IntroducingCommitSet {
  std::string issue_key;
  std::vector<IntroducingCommit> commits;  // sorted by id, unique
  SzzSource source = SzzSource::basic;
};

struct PathRemovals {
  std::string path;
  std::vector<RemovedLine> lines;
};

/// Deletion side of the fix's first-parent diff with blank and
/// whitespace-only lines dropped. Root commits yield nothing (with a warning).
std::vector<PathRemovals> removed_lines(const CommitRecord& fix_commit);

/// Line-level `git blame --porcelain` with one cached annotation per
/// (revision, path). Thread-safe.
class Blamer {
public:
  explicit Blamer(const GitRepository& repo) : repo_(&repo) {}

  /// Commit that last modified `line` (1-based) of `path` as of `rev`.
  /// Throws Error when the line is out of range.
  std::string blame_line(const std::string& path, int line, const std::string& rev);

  /// Whole-file annotation: entry i is the commit owning line i+1.
  const std::vector<std::string>& annotate(const std::string& path, const std::string& rev);

private:
  const GitRepository* repo_;
  std::mutex mutex_;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> cache_;
};

/// Parses `git blame --porcelain` output into per-line commit ids.
std::vector<std::string> parse_blame_porcelain(std::string_view output);

struct SzzDiagnostics {
  std::vector<std::string> messages;
};

/// Basic SZZ: blame every removed line of every fix commit at that commit's
/// first parent, union the results, and drop commits later than the defect's
/// fix. Blame lookups run on up to `jobs` threads.
IntroducingCommitSet introducing_commits(const DefectLifecycle& defect, const CommitIndex& commits,
                                         Blamer& blamer, int jobs = 1, SzzDiagnostics* diag = nullptr);

/// Oldest version among the introducing commits, or nullopt when the set is
/// empty or every commit is after the last release.
std::optional<VersionIndex> szz_iv(const IntroducingCommitSet& set, const VersionTimeline& timeline);

/// Drops introducing commits later than `fix_time`.
IntroducingCommitSet discard_after(IntroducingCommitSet set, Timestamp fix_time);

struct SzzImport {
  std::vector<IntroducingCommitSet> sets;  // sorted by (source, issue key)
  std::vector<SkipReport> skipped;
};

/// Reads `issue_key,introducing_commit_hash,source` rows (source U or RA).
/// Hashes resolve through `commits` (full or unique prefix); unknown hashes
/// are reported and skipped. A malformed document throws ParseError.
SzzImport import_external_szz(std::string_view csv_text, const CommitIndex& commits);

}  // namespace dlm
