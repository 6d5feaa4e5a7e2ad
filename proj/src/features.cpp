#include "dlm/features.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <limits>

#include "dlm/csv.hpp"
#include "dlm/git.hpp"
#include "dlm/ingest.hpp"
#include "dlm/lifecycle.hpp"

namespace dlm {

namespace {

const std::vector<FeatureSpec>& standard_entries() {
  static const std::vector<FeatureSpec> entries = {
      {"LOC", FeatureKind::product, "Lines of code in the release snapshot", Metric::loc},
      {"LOC_NoComment", FeatureKind::product, "Lines with code outside comments and blanks", Metric::loc_no_comment},
      {"LOC_Added", FeatureKind::process, "Lines added during the release", Metric::loc_added},
      {"MAX_LOC_Added", FeatureKind::process, "Largest single-revision addition", Metric::max_loc_added},
      {"AVG_LOC_Added", FeatureKind::process, "Mean lines added per revision", Metric::avg_loc_added},
      {"LOC_Deleted", FeatureKind::process, "Lines deleted during the release", Metric::loc_deleted},
      {"Churn", FeatureKind::process, "Added plus deleted lines during the release", Metric::churn},
      {"MAX_Churn", FeatureKind::process, "Largest single-revision churn", Metric::max_churn},
      {"AVG_Churn", FeatureKind::process, "Mean churn per revision", Metric::avg_churn},
      {"NR", FeatureKind::process, "Revisions touching the class during the release", Metric::revisions},
      {"NAuth", FeatureKind::process, "Distinct authors during the release", Metric::authors},
      {"ChgSetSize_AVG", FeatureKind::process, "Mean files per revision touching the class", Metric::avg_changeset},
      {"ChgSetSize_MAX", FeatureKind::process, "Most files in one revision touching the class", Metric::max_changeset},
      {"Age", FeatureKind::process, "Weeks from the class's first commit to the release", Metric::age_weeks},
      {"WeightedAge", FeatureKind::process, "Release-relative age of revisions weighted by lines added",
       Metric::weighted_age_weeks},
      {"NFix", FeatureKind::process, "Defect-fix revisions touching the class during the release", Metric::fix_count},
      {"CoChangedFiles", FeatureKind::process, "Distinct other files changed together with the class",
       Metric::cochanged_files},
  };
  return entries;
}

constexpr double kSecondsPerWeek = 7.0 * 24 * 3600;

double weeks_between(Timestamp from, Timestamp to) {
  return static_cast<double>((to - from).count()) / kSecondsPerWeek;
}

struct ClassStats {
  double added = 0, deleted = 0, max_added = 0, max_churn = 0;
  double revisions = 0, changeset_sum = 0, max_changeset = 0, fixes = 0;
  double weighted_age_num = 0;
  std::set<std::string> authors;
  std::set<std::string> cochanged;
  std::optional<Timestamp> first_touch;
};

}  // namespace

FeatureCatalog::FeatureCatalog(std::vector<FeatureSpec> entries) : entries_(std::move(entries)) {
  std::set<std::string> names;
  for (const auto& e : entries_) {
    if (!names.insert(e.name).second) throw Error("duplicate feature name '" + e.name + "'");
  }
}

const FeatureCatalog& FeatureCatalog::standard() {
  static const FeatureCatalog catalog(standard_entries());
  return catalog;
}

FeatureCatalog FeatureCatalog::from_csv(std::string_view text) {
  const auto table = csv::parse(text);
  const auto name_col = table.require_column("name");
  const auto kind_col = table.require_column("kind");
  const auto desc_col = table.column("description");
  std::vector<FeatureSpec> entries;
  for (const auto& row : table.rows()) {
    const std::string name = trim(row.at(name_col));
    auto known = std::find_if(standard_entries().begin(), standard_entries().end(),
                              [&](const FeatureSpec& s) { return to_lower(s.name) == to_lower(name); });
    if (known == standard_entries().end()) {
      throw ParseError("feature catalog: no metric implements '" + name + "'");
    }
    FeatureSpec spec = *known;
    spec.name = name;
    const auto kind = to_lower(trim(row.at(kind_col)));
    if (kind == "product") spec.kind = FeatureKind::product;
    else if (kind == "process") spec.kind = FeatureKind::process;
    else throw ParseError("feature catalog: kind must be product or process, got '" + row.at(kind_col) + "'");
    if (desc_col) spec.description = row.at(*desc_col);
    entries.push_back(std::move(spec));
  }
  return FeatureCatalog(std::move(entries));
}

std::vector<std::string> FeatureCatalog::names() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

int count_lines(std::string_view text) {
  if (text.empty()) return 0;
  const auto newlines = std::count(text.begin(), text.end(), '\n');
  return static_cast<int>(newlines) + (text.back() == '\n' ? 0 : 1);
}

int count_code_lines(std::string_view text) {
  int lines = 0;
  bool in_block = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;

    bool code = false;
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      const char next = i + 1 < line.size() ? line[i + 1] : '\0';
      if (in_block) {
        if (c == '*' && next == '/') {
          in_block = false;
          ++i;
        }
        continue;
      }
      if (quote) {
        if (c == '\\') ++i;
        else if (c == quote) quote = 0;
        continue;
      }
      if (c == '/' && next == '/') break;
      if (c == '/' && next == '*') {
        in_block = true;
        ++i;
        continue;
      }
      if (c == '"' || c == '\'') quote = c;
      if (!std::isspace(static_cast<unsigned char>(c))) code = true;
    }
    if (code) ++lines;
  }
  return lines;
}

std::vector<FeatureRow> compute_features(const VersionSlice& slice, std::span<const CommitRecord> commits,
                                         const std::set<std::string>& fix_commits, const FeatureCatalog& catalog) {
  std::map<std::string, ClassStats> stats;
  for (const auto& [path, text] : slice.contents) stats.emplace(path, ClassStats{});

  for (const auto& commit : commits) {
    if (commit.timestamp > slice.release_date) continue;
    const bool in_interval = !slice.interval_start || commit.timestamp > *slice.interval_start;
    for (const auto& change : commit.changes) {
      auto it = stats.find(change.path);
      if (it == stats.end()) continue;
      ClassStats& s = it->second;
      if (!s.first_touch || commit.timestamp < *s.first_touch) s.first_touch = commit.timestamp;
      if (!in_interval) continue;

      const double added = change.added;
      const double churn = added + change.deleted();
      const double files = static_cast<double>(commit.changes.size());
      s.added += added;
      s.deleted += change.deleted();
      s.max_added = std::max(s.max_added, added);
      s.max_churn = std::max(s.max_churn, churn);
      s.revisions += 1;
      s.changeset_sum += files;
      s.max_changeset = std::max(s.max_changeset, files);
      s.weighted_age_num += weeks_between(commit.timestamp, slice.release_date) * added;
      if (fix_commits.contains(commit.id)) s.fixes += 1;
      s.authors.insert(commit.author);
      for (const auto& other : commit.changes) {
        if (other.path != change.path) s.cochanged.insert(other.path);
      }
    }
  }

  auto ratio = [](double num, double den) { return den > 0 ? num / den : 0.0; };
  std::vector<FeatureRow> rows;
  rows.reserve(stats.size());
  for (const auto& [path, s] : stats) {
    const std::string& text = slice.contents.at(path);
    FeatureRow row;
    row.key = {slice.version, path};
    row.values.resize(static_cast<Eigen::Index>(catalog.size()));
    Eigen::Index col = 0;
    for (const auto& spec : catalog.entries()) {
      double v = 0.0;
      switch (spec.metric) {
        case Metric::loc: v = count_lines(text); break;
        case Metric::loc_no_comment: v = count_code_lines(text); break;
        case Metric::loc_added: v = s.added; break;
        case Metric::max_loc_added: v = s.max_added; break;
        case Metric::avg_loc_added: v = ratio(s.added, s.revisions); break;
        case Metric::loc_deleted: v = s.deleted; break;
        case Metric::churn: v = s.added + s.deleted; break;
        case Metric::max_churn: v = s.max_churn; break;
        case Metric::avg_churn: v = ratio(s.added + s.deleted, s.revisions); break;
        case Metric::revisions: v = s.revisions; break;
        case Metric::authors: v = static_cast<double>(s.authors.size()); break;
        case Metric::avg_changeset: v = ratio(s.changeset_sum, s.revisions); break;
        case Metric::max_changeset: v = s.max_changeset; break;
        case Metric::age_weeks: v = s.first_touch ? weeks_between(*s.first_touch, slice.release_date) : 0.0; break;
        case Metric::weighted_age_weeks: v = ratio(s.weighted_age_num, s.added); break;
        case Metric::fix_count: v = s.fixes; break;
        case Metric::cochanged_files: v = static_cast<double>(s.cochanged.size()); break;
      }
      row.values[col++] = v;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<FeatureRow> compute_features(const GitRepository& repo, std::span<const CommitRecord> commits,
                                         const VersionTimeline& timeline, VersionIndex version,
                                         const FeatureCatalog& catalog, const std::set<std::string>& fix_commits,
                                         const ExtensionFilter& filter) {
  VersionSlice slice;
  slice.version = version;
  slice.release_date = timeline.at(version).release_date;
  if (version > 1) slice.interval_start = timeline.at(version - 1).release_date;

  if (const auto snapshot = snapshot_commit(commits, slice.release_date)) {
    std::vector<TreeEntry> classes;
    for (auto& entry : repo.ls_tree(*snapshot)) {
      if (filter(entry.path)) classes.push_back(std::move(entry));
    }
    std::vector<std::string> blob_ids;
    for (const auto& e : classes) blob_ids.push_back(e.blob);
    const auto blobs = repo.read_blobs(blob_ids);
    for (const auto& e : classes) {
      auto it = blobs.find(e.blob);
      slice.contents.emplace(e.path, it == blobs.end() ? std::string{} : it->second);
    }
  }
  return compute_features(slice, commits, fix_commits, catalog);
}

std::size_t retained_versions(std::size_t version_count) { return version_count / 2; }

Eigen::MatrixXd Dataset::design_matrix() const {
  const auto cols = static_cast<Eigen::Index>(feature_names.size());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) x.row(static_cast<Eigen::Index>(r)) = rows[r].values.transpose();
  return x;
}

Eigen::VectorXd Dataset::labels() const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) y[static_cast<Eigen::Index>(r)] = rows[r].defective ? 1.0 : 0.0;
  return y;
}

Dataset build_dataset(std::span<const FeatureRow> feature_rows, const FeatureCatalog& catalog,
                      const DefectivenessMatrix& matrix, VersionIndex release, std::size_t retained) {
  if (release < 1 || static_cast<std::size_t>(release) > retained) {
    throw Error("dataset release " + std::to_string(release) + " outside retained versions 1.." +
                std::to_string(retained));
  }
  Dataset ds;
  ds.method = matrix.method;
  ds.release = release;
  ds.feature_names = catalog.names();
  for (const auto& row : feature_rows) {
    if (row.key.version > release) continue;
    FeatureRow labeled = row;
    labeled.defective = matrix.defective(row.key);
    ds.rows.push_back(std::move(labeled));
  }
  std::sort(ds.rows.begin(), ds.rows.end(), [](const FeatureRow& a, const FeatureRow& b) { return a.key < b.key; });
  return ds;
}

}  // namespace dlm
