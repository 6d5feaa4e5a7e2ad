#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dlm/common.hpp"

namespace dlm {

class GitRepository;

struct IssueRecord {
  std::string key;
  Timestamp created;
  std::string issue_type;
  std::string status;
  std::string resolution;
  std::vector<std::string> affected_version_names;
  std::vector<std::string> fix_version_names;
};

/// A record dropped while parsing, with its position in the source document.
struct SkipReport {
  std::size_t index = 0;
  std::string key;
  std::string reason;
};

struct IssueExport {
  std::vector<IssueRecord> issues;
  std::vector<SkipReport> skipped;
};

/// Parses a JSON array of tracker issues (`key`, `fields.created`,
/// `fields.issuetype.name`, `fields.status.name`, `fields.resolution.name`,
/// `fields.versions[].name`, `fields.fixVersions[].name`). An object wrapping
/// the array under `issues` is accepted too.
///
/// A document that is not JSON, or an element that is not an object, throws
/// ParseError naming the element index. Records missing `key` or `created`
/// (or with an unparsable `created`) are skipped and reported.
IssueExport parse_issue_export(std::string_view json_text);

/// Keeps fixed defects: type bug/defect, status Closed/Resolved, resolution
/// Fixed, all compared case-insensitively.
std::vector<IssueRecord> filter_fixed_defects(std::span<const IssueRecord> issues);

struct RemovedLine {
  int line = 0;  // 1-based line number in the parent revision
  std::string text;
};

/// One path touched by a commit. `removed` is the deletion side of the
/// first-parent diff; binary files carry an empty list.
struct FileChange {
  std::string path;
  std::vector<RemovedLine> removed;
  int added = 0;
  bool binary = false;

  int deleted() const { return static_cast<int>(removed.size()); }
};

struct CommitRecord {
  std::string id;
  Timestamp timestamp;
  std::string author;
  std::string message;
  std::vector<std::string> parents;
  std::vector<FileChange> changes;  // sorted by path; empty for merges

  bool is_merge() const { return parents.size() > 1; }
  std::vector<std::string> touched_paths() const;
};

/// Walks every commit reachable from the repository's analyzed branch in
/// topological order (parents first). Diffs use `-U0 --no-renames` against the
/// first parent; merge commits carry no changes.
std::vector<CommitRecord> extract_commits(const GitRepository& repo);

/// Parses the output of the `git log` invocation used by extract_commits.
/// Exposed so the diff parser can be exercised without a repository.
std::vector<CommitRecord> parse_git_log(std::string_view log_output);

/// The `git log` arguments extract_commits passes (after `git -C <repo>`).
std::vector<std::string> git_log_arguments(const std::string& branch);

/// Lookup by full hash or unique abbreviated prefix (>= 4 characters).
class CommitIndex {
public:
  explicit CommitIndex(std::span<const CommitRecord> commits);

  const CommitRecord* find(std::string_view id) const;
  const CommitRecord& at(std::string_view id) const;
  /// Position of the commit in extraction (topological) order.
  std::size_t position(std::string_view id) const;
  std::span<const CommitRecord> commits() const { return commits_; }

private:
  std::span<const CommitRecord> commits_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

struct IssueCommitLink {
  std::string issue_key;
  std::vector<std::string> commit_ids;  // ascending (timestamp, id)
};

/// True when `key` occurs in `message` delimited by non-alphanumeric
/// characters (or the ends of the message). Case-sensitive.
bool mentions_key(std::string_view message, std::string_view key);

/// One link per key (sorted by key); keys no commit mentions get an empty
/// commit list.
std::vector<IssueCommitLink> link_commits_to_issues(std::span<const CommitRecord> commits,
                                                    const std::set<std::string>& keys);

/// The fix commit is the last linked commit (greatest timestamp). Throws
/// Excluded("unlinked defect") for an empty link.
const std::string& resolve_fix_commit(const IssueCommitLink& link);

}  // namespace dlm
