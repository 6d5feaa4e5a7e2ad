#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dlm/common.hpp"

namespace dlm {

struct SyntheticSpec {
  std::string project = "SYN";
  int versions = 6;
  int defects = 20;
  int classes = 10;
  /// P drawn per defect from Normal(p_mean, p_sd); p_sd = 0 gives exactly p_mean
  /// whenever the version grid allows it.
  double p_mean = 2.0;
  double p_sd = 0.0;
  double unavailable_rate = 0.1;
  double inconsistent_rate = 0.1;
  int noise_commits = 30;
  int other_issues = 2;      // non-defect issues with linked commits
  int unlinked_defects = 1;  // fixed bugs no commit mentions
  int unreleased_fixes = 1;  // bugs fixed after the last release
  std::uint64_t seed = 1;
};

struct SyntheticDefect {
  std::string key;
  int iv = 0, ov = 0, fv = 0;  // planted life cycle
  bool available = true;
  bool consistent = true;
  std::vector<int> tracker_avs;  // versions the tracker lists
  Timestamp created;
  std::string bug_path;
  int intro_commit = 0;              // commit ordinal (fast-import mark)
  std::vector<int> fix_commits;      // ascending time
  std::vector<int> szz_b_commits;    // commits blame must report, sorted
  std::optional<int> szz_b_iv;       // oldest version among them
  int extra_u_commit = 0;            // older commit only the U import lists
  std::set<std::string> touched;     // .java paths the fixes touch
};

struct SyntheticCommit {
  int mark = 0;
  Timestamp time;
  std::string author;
};

struct SyntheticProject {
  SyntheticSpec spec;
  std::vector<std::pair<std::string, Timestamp>> releases;  // released, oldest first
  std::vector<SyntheticDefect> defects;
  std::vector<SyntheticCommit> commits;  // by mark
  std::string issues_json;
  std::string versions_csv;
  std::string fast_import;  // the commit log as a `git fast-import` stream
};

/// Builds a project whose true IV/OV/FV per defect are known by construction.
/// Deterministic for a given seed. Throws Error for an infeasible spec.
SyntheticProject generate_synthetic(const SyntheticSpec& spec);

/// affected[v - 1] for v in 1..fv by direct range expansion of [iv, fv).
std::vector<bool> expand_range(int iv, int fv);

struct MaterializedProject {
  std::filesystem::path dir;
  std::filesystem::path config;
  std::filesystem::path repo;
  std::map<int, std::string> hashes;  // mark -> commit id
};

/// Writes issues.json, versions.csv, history.fi, the git repository (repo/),
/// szz_import.csv, oracle_labels.csv, oracle_defects.csv and project.cfg into
/// `dir`. Refuses to reuse an existing repo/ directory.
MaterializedProject materialize_synthetic(const SyntheticProject& project, const std::filesystem::path& dir);

}  // namespace dlm
