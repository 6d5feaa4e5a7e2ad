#include "dlm/classlabel.hpp"

#include <spdlog/spdlog.h>

#include "dlm/avlabel.hpp"
#include "dlm/git.hpp"
#include "dlm/ingest.hpp"
#include "dlm/lifecycle.hpp"

namespace dlm {

bool ExtensionFilter::operator()(std::string_view path) const {
  for (const auto& ext : extensions_) {
    if (ext.empty() || ext == "*") return true;
    if (path.size() >= ext.size() && path.ends_with(ext)) return true;
  }
  return false;
}

PathSet touched_classes(std::span<const CommitRecord* const> fix_commits, const ExtensionFilter& filter) {
  PathSet paths;
  for (const CommitRecord* commit : fix_commits) {
    for (const auto& change : commit->changes) {
      if (filter(change.path)) paths.insert(change.path);
    }
  }
  return paths;
}

std::optional<std::string> snapshot_commit(std::span<const CommitRecord> commits, Timestamp release_date) {
  const CommitRecord* best = nullptr;
  for (const auto& c : commits) {
    if (c.timestamp <= release_date && (!best || c.timestamp >= best->timestamp)) best = &c;
  }
  if (!best) return std::nullopt;
  return best->id;
}

PathSet class_universe(const GitRepository& repo, std::span<const CommitRecord> commits,
                       const VersionTimeline& timeline, VersionIndex version, const ExtensionFilter& filter) {
  const auto snapshot = snapshot_commit(commits, timeline.at(version).release_date);
  PathSet paths;
  if (!snapshot) {
    spdlog::warn("version {} ({}) predates every commit; empty class universe", version,
                 timeline.at(version).name);
    return paths;
  }
  for (const auto& entry : repo.ls_tree(*snapshot)) {
    if (filter(entry.path)) paths.insert(entry.path);
  }
  return paths;
}

namespace {

struct Hit {
  const AffectedLabeling* labeling;
  const PathSet* touched;
};

DefectivenessMatrix build_matrix(std::string method, std::span<const AffectedLabeling> labelings,
                                 const std::map<std::string, PathSet>& touched, const ClassUniverse& universes) {
  DefectivenessMatrix m;
  m.method = std::move(method);
  for (const auto& [version, paths] : universes) {
    for (const auto& path : paths) m.entries.emplace(ClassVersionKey{version, path}, false);
  }
  std::set<std::string> missing_paths;
  for (const auto& labeling : labelings) {
    auto t = touched.find(labeling.issue_key());
    if (t == touched.end()) continue;
    for (const VersionIndex v : labeling.affected_versions()) {
      for (const auto& path : t->second) {
        ClassVersionKey key{v, path};
        m.defect_hits[key].insert(labeling.issue_key());
        if (auto e = m.entries.find(key); e != m.entries.end()) {
          e->second = true;
        } else {
          missing_paths.insert(path);
        }
      }
    }
  }
  for (const auto& path : missing_paths) {
    bool anywhere = false;
    for (const auto& [version, paths] : universes) anywhere = anywhere || paths.contains(path);
    if (!anywhere) {
      m.warnings.push_back("touched path " + path + " is absent from every version snapshot");
    }
  }
  for (const auto& w : m.warnings) spdlog::warn("{}: {}", m.method, w);
  return m;
}

}  // namespace

DefectivenessMatrix label_classes(std::string method, std::span<const AffectedLabeling> labelings,
                                  const std::map<std::string, PathSet>& touched, const ClassUniverse& universes) {
  return build_matrix(std::move(method), labelings, touched, universes);
}

DefectivenessMatrix ground_truth_classes(std::span<const DefectLifecycle> defects,
                                         const std::map<std::string, PathSet>& touched,
                                         const ClassUniverse& universes) {
  std::vector<AffectedLabeling> truth;
  truth.reserve(defects.size());
  for (const auto& d : defects) truth.push_back(ground_truth_labeling(d));
  return build_matrix(std::string(kActual), truth, touched, universes);
}

}  // namespace dlm
