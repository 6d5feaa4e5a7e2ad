#include "dlm/lifecycle.hpp"

#include <fnmatch.h>
#include <json.hpp>

#include <algorithm>
#include <tuple>

#include "dlm/csv.hpp"
#include "dlm/ingest.hpp"

namespace dlm {

VersionTimeline::VersionTimeline(std::vector<Release> releases) : releases_(std::move(releases)) {
  for (std::size_t i = 0; i < releases_.size(); ++i) {
    if (releases_[i].index != static_cast<VersionIndex>(i + 1)) {
      throw Error("release indices must be contiguous from 1");
    }
    if (i > 0 && releases_[i].release_date < releases_[i - 1].release_date) {
      throw Error("release dates must be non-decreasing with index");
    }
    if (!name_index_.emplace(releases_[i].name, releases_[i].index).second) {
      throw Error("duplicate release name '" + releases_[i].name + "'");
    }
  }
}

const Release& VersionTimeline::at(VersionIndex index) const {
  if (index < 1 || static_cast<std::size_t>(index) > releases_.size()) {
    throw Error("version index " + std::to_string(index) + " out of range");
  }
  return releases_[static_cast<std::size_t>(index - 1)];
}

std::optional<VersionIndex> VersionTimeline::index_of(std::string_view name) const {
  if (auto it = name_index_.find(name); it != name_index_.end()) return it->second;
  return std::nullopt;
}

std::optional<VersionIndex> VersionTimeline::version_of_timestamp(Timestamp t) const {
  auto it = std::lower_bound(releases_.begin(), releases_.end(), t,
                             [](const Release& r, Timestamp ts) { return r.release_date < ts; });
  if (it == releases_.end()) return std::nullopt;
  return it->index;
}

VersionIndex VersionTimeline::current_version_at(Timestamp t) const {
  auto it = std::upper_bound(releases_.begin(), releases_.end(), t,
                             [](Timestamp ts, const Release& r) { return ts < r.release_date; });
  if (it == releases_.begin()) return 1;
  return std::prev(it)->index;
}

VersionTimeline build_timeline(std::span<const RawVersion> raw_versions,
                               std::span<const std::string> exclusion_patterns) {
  std::vector<Release> kept;
  for (const auto& v : raw_versions) {
    if (!v.released || !v.release_date) continue;
    const bool excluded = std::any_of(exclusion_patterns.begin(), exclusion_patterns.end(),
                                      [&](const std::string& pattern) {
                                        return fnmatch(pattern.c_str(), v.name.c_str(), 0) == 0;
                                      });
    if (excluded) continue;
    kept.push_back({v.name, 0, *v.release_date});
  }
  if (kept.empty()) {
    throw Error("no released, dated versions remain after exclusions");
  }
  std::sort(kept.begin(), kept.end(), [](const Release& a, const Release& b) {
    return std::tie(a.release_date, a.name) < std::tie(b.release_date, b.name);
  });
  kept.erase(std::unique(kept.begin(), kept.end(),
                         [](const Release& a, const Release& b) { return a.name == b.name; }),
             kept.end());
  for (std::size_t i = 0; i < kept.size(); ++i) kept[i].index = static_cast<VersionIndex>(i + 1);
  return VersionTimeline(std::move(kept));
}

namespace {

bool parse_flag(std::string_view raw) {
  const auto v = to_lower(trim(raw));
  if (v.empty() || v == "true" || v == "1" || v == "yes" || v == "y") return true;
  if (v == "false" || v == "0" || v == "no" || v == "n") return false;
  throw ParseError("invalid released flag '" + std::string(raw) + "'");
}

}  // namespace

std::vector<RawVersion> parse_versions_csv(std::string_view text) {
  const auto table = csv::parse(text);
  const auto name_col = table.require_column("name");
  const auto date_col = table.require_column("release_date");
  const auto released_col = table.column("released");
  std::vector<RawVersion> versions;
  for (const auto& row : table.rows()) {
    RawVersion v;
    v.name = row.at(name_col);
    const auto date = trim(row.at(date_col));
    if (!date.empty()) v.release_date = parse_timestamp(date);
    if (released_col) v.released = parse_flag(row.at(*released_col));
    versions.push_back(std::move(v));
  }
  return versions;
}

std::vector<RawVersion> parse_versions_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("version list is not valid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("versions")) doc = doc.at("versions");
  if (!doc.is_array()) throw ParseError("version list must be a JSON array");
  std::vector<RawVersion> versions;
  for (const auto& item : doc) {
    RawVersion v;
    v.name = item.value("name", std::string{});
    if (item.contains("releaseDate") && item.at("releaseDate").is_string()) {
      v.release_date = parse_timestamp(item.at("releaseDate").get<std::string>());
    }
    v.released = item.value("released", true);
    if (item.value("archived", false) && !v.release_date) v.released = false;
    versions.push_back(std::move(v));
  }
  return versions;
}

DefectLifecycle derive_lifecycle(const IssueRecord& issue, const IssueCommitLink& link,
                                 const CommitIndex& commits, const VersionTimeline& timeline) {
  const std::string& fix_id = resolve_fix_commit(link);
  const CommitRecord& fix = commits.at(fix_id);
  const auto fv = timeline.version_of_timestamp(fix.timestamp);
  if (!fv) {
    throw Excluded(issue.key, "unreleased fix");
  }

  DefectLifecycle d;
  d.issue_key = issue.key;
  d.created = issue.created;
  d.ov = std::min(timeline.current_version_at(issue.created), *fv);
  d.fv = *fv;
  d.fix_commits = link.commit_ids;
  d.fix_timestamp = fix.timestamp;
  for (const auto& name : issue.affected_version_names) {
    if (auto idx = timeline.index_of(name)) d.ground_truth_avs.push_back(*idx);
  }
  std::sort(d.ground_truth_avs.begin(), d.ground_truth_avs.end());
  d.ground_truth_avs.erase(std::unique(d.ground_truth_avs.begin(), d.ground_truth_avs.end()),
                           d.ground_truth_avs.end());
  return d;
}

AvUsability usability(const DefectLifecycle& defect) {
  AvUsability u;
  u.available = !defect.ground_truth_avs.empty();
  u.consistent = u.available && defect.ground_truth_avs.front() <= defect.ov;
  return u;
}

bool post_release_filter(const DefectLifecycle& defect) {
  const auto iv = defect.ground_truth_iv();
  return !(iv && *iv == defect.fv);
}

void order_by_fix_date(std::vector<DefectLifecycle>& defects) {
  std::sort(defects.begin(), defects.end(), [](const DefectLifecycle& a, const DefectLifecycle& b) {
    return std::tie(a.fix_timestamp, a.issue_key) < std::tie(b.fix_timestamp, b.issue_key);
  });
}

namespace {

void fill_percentages(Rq1Row& row) {
  if (row.linked == 0) {
    row.pct_available.reset();
    row.pct_consistent.reset();
    return;
  }
  row.pct_available = 100.0 * static_cast<double>(row.available) / static_cast<double>(row.linked);
  row.pct_consistent = 100.0 * static_cast<double>(row.consistent) / static_cast<double>(row.linked);
}

}  // namespace

Rq1Summary rq1_summary(std::span<const ProjectDefects> projects) {
  Rq1Summary summary;
  summary.totals.project = "TOTAL";
  for (const auto& p : projects) {
    Rq1Row row;
    row.project = p.project;
    row.defects = p.fixed_defects;
    row.linked = p.defects.size();
    row.version_count = p.version_count;
    for (const auto& d : p.defects) {
      const auto u = usability(d);
      row.available += u.available ? 1 : 0;
      row.consistent += u.consistent ? 1 : 0;
    }
    fill_percentages(row);
    summary.totals.defects += row.defects;
    summary.totals.linked += row.linked;
    summary.totals.available += row.available;
    summary.totals.consistent += row.consistent;
    summary.projects.push_back(std::move(row));
  }
  fill_percentages(summary.totals);
  return summary;
}

std::vector<std::string> selection_failures(const Rq1Row& row, const SelectionThresholds& t) {
  std::vector<std::string> failures;
  if (row.consistent < t.min_usable_defects) {
    failures.push_back("usable defects " + std::to_string(row.consistent) + " < " +
                       std::to_string(t.min_usable_defects));
  }
  if (row.version_count < t.min_versions) {
    failures.push_back("versions " + std::to_string(row.version_count) + " < " +
                       std::to_string(t.min_versions));
  }
  if (!row.pct_consistent || *row.pct_consistent < t.min_pct_consistent) {
    failures.push_back("available+consistent " + csv::number(row.pct_consistent) + "% < " +
                       csv::number(t.min_pct_consistent) + "%");
  }
  return failures;
}

std::vector<std::string> select_projects(std::span<const Rq1Row> summaries, const SelectionThresholds& t) {
  std::vector<std::string> kept;
  for (const auto& row : summaries) {
    if (selection_failures(row, t).empty()) kept.push_back(row.project);
  }
  return kept;
}

}  // namespace dlm
