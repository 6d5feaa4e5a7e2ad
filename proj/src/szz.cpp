#include "dlm/szz.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <set>

#include "dlm/csv.hpp"
#include "dlm/git.hpp"
#include "dlm/lifecycle.hpp"
#include "dlm/parallel.hpp"

namespace dlm {

std::string_view szz_source_name(SzzSource s) {
  switch (s) {
    case SzzSource::basic: return "B";
    case SzzSource::imported_u: return "U";
    case SzzSource::imported_ra: return "RA";
  }
  return "?";
}

namespace {

bool is_blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

bool is_hex_id(std::string_view s) {
  return s.size() >= 40 && std::all_of(s.begin(), s.begin() + 40, [](unsigned char c) {
           return std::isxdigit(c) != 0;
         });
}

}  // namespace

std::vector<PathRemovals> removed_lines(const CommitRecord& fix_commit) {
  std::vector<PathRemovals> result;
  if (fix_commit.parents.empty()) {
    spdlog::warn("commit {} has no parent; nothing to blame", fix_commit.id);
    return result;
  }
  for (const auto& change : fix_commit.changes) {
    PathRemovals entry{change.path, {}};
    for (const auto& line : change.removed) {
      if (!is_blank(line.text)) entry.lines.push_back(line);
    }
    if (!entry.lines.empty()) result.push_back(std::move(entry));
  }
  return result;
}

std::vector<std::string> parse_blame_porcelain(std::string_view output) {
  // Each annotated line starts with "<sha> <orig> <final> [<count>]" followed by
  // optional header lines and a TAB-prefixed content line.
  std::vector<std::string> owners;
  std::size_t pos = 0;
  while (pos < output.size()) {
    auto nl = output.find('\n', pos);
    if (nl == std::string_view::npos) nl = output.size();
    const std::string_view line = output.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty() || line.front() == '\t' || !is_hex_id(line)) continue;
    const auto sp1 = line.find(' ');
    const auto sp2 = line.find(' ', sp1 + 1);
    if (sp1 == std::string_view::npos || sp2 == std::string_view::npos) continue;
    auto sp3 = line.find(' ', sp2 + 1);
    const auto final_str = line.substr(sp2 + 1, (sp3 == std::string_view::npos ? line.size() : sp3) - sp2 - 1);
    const std::size_t final_line = std::stoul(std::string(final_str));
    if (owners.size() < final_line) owners.resize(final_line);
    owners[final_line - 1] = std::string(line.substr(0, sp1));
  }
  return owners;
}

const std::vector<std::string>& Blamer::annotate(const std::string& path, const std::string& rev) {
  const auto key = std::make_pair(rev, path);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto owners = parse_blame_porcelain(repo_->git({"blame", "--porcelain", rev, "--", path}));
  std::lock_guard lock(mutex_);
  return cache_.emplace(key, std::move(owners)).first->second;
}

std::string Blamer::blame_line(const std::string& path, int line, const std::string& rev) {
  const auto& owners = annotate(path, rev);
  if (line < 1 || static_cast<std::size_t>(line) > owners.size()) {
    throw Error("line " + std::to_string(line) + " out of range for " + path + " at " + rev);
  }
  return owners[static_cast<std::size_t>(line - 1)];
}

IntroducingCommitSet introducing_commits(const DefectLifecycle& defect, const CommitIndex& commits,
                                         Blamer& blamer, int jobs, SzzDiagnostics* diag) {
  struct Job {
    std::string rev;
    std::string path;
    std::vector<RemovedLine> lines;
  };
  std::vector<Job> work;
  for (const auto& fix_id : defect.fix_commits) {
    const CommitRecord& fix = commits.at(fix_id);
    if (fix.parents.empty()) {
      if (diag) diag->messages.push_back(defect.issue_key + ": fix " + fix.id + " is a root commit");
      continue;
    }
    for (auto& removal : removed_lines(fix)) {
      work.push_back({fix.parents.front(), std::move(removal.path), std::move(removal.lines)});
    }
  }

  std::vector<std::vector<std::string>> found(work.size());
  std::vector<std::vector<std::string>> errors(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t i) {
    const Job& job = work[i];
    for (const auto& line : job.lines) {
      try {
        found[i].push_back(blamer.blame_line(job.path, line.line, job.rev));
      } catch (const Error& e) {
        errors[i].push_back(defect.issue_key + ": " + e.what());
      }
    }
  });

  std::set<std::string> ids;
  for (const auto& f : found) ids.insert(f.begin(), f.end());
  if (diag) {
    for (const auto& e : errors) diag->messages.insert(diag->messages.end(), e.begin(), e.end());
  }

  IntroducingCommitSet set{defect.issue_key, {}, SzzSource::basic};
  for (const auto& id : ids) {
    const CommitRecord* c = commits.find(id);
    if (!c) {
      if (diag) diag->messages.push_back(defect.issue_key + ": blamed commit " + id + " not on branch");
      continue;
    }
    set.commits.push_back({c->id, c->timestamp});
  }
  return discard_after(std::move(set), defect.fix_timestamp);
}

IntroducingCommitSet discard_after(IntroducingCommitSet set, Timestamp fix_time) {
  std::erase_if(set.commits, [&](const IntroducingCommit& c) { return c.timestamp > fix_time; });
  return set;
}

std::optional<VersionIndex> szz_iv(const IntroducingCommitSet& set, const VersionTimeline& timeline) {
  std::optional<VersionIndex> iv;
  for (const auto& c : set.commits) {
    if (auto v = timeline.version_of_timestamp(c.timestamp)) {
      iv = iv ? std::min(*iv, *v) : *v;
    }
  }
  return iv;
}

SzzImport import_external_szz(std::string_view csv_text, const CommitIndex& commits) {
  SzzImport result;
  if (trim(csv_text).empty()) return result;
  const auto table = csv::parse(csv_text);
  const auto key_col = table.require_column("issue_key");
  const auto hash_col = table.require_column("introducing_commit_hash");
  const auto source_col = table.require_column("source");

  std::map<std::pair<SzzSource, std::string>, std::set<std::string>> grouped;
  for (std::size_t i = 0; i < table.rows().size(); ++i) {
    const auto& row = table.rows()[i];
    if (row.size() != table.header().size()) {
      throw ParseError("external SZZ row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                       " fields");
    }
    const std::string key = trim(row[key_col]);
    const std::string source_name = to_lower(trim(row[source_col]));
    SzzSource source;
    if (source_name == "u") source = SzzSource::imported_u;
    else if (source_name == "ra") source = SzzSource::imported_ra;
    else throw ParseError("external SZZ row " + std::to_string(i + 1) + ": unknown source '" + row[source_col] + "'");

    const CommitRecord* commit = commits.find(trim(row[hash_col]));
    if (!commit) {
      result.skipped.push_back({i, key, "unknown commit " + row[hash_col]});
      continue;
    }
    grouped[{source, key}].insert(commit->id);
  }
  for (const auto& [group, ids] : grouped) {
    IntroducingCommitSet set{group.second, {}, group.first};
    for (const auto& id : ids) set.commits.push_back({id, commits.at(id).timestamp});
    result.sets.push_back(std::move(set));
  }
  return result;
}

}  // namespace dlm
