#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dlm/avlabel.hpp"
#include "dlm/lifecycle.hpp"

namespace dlm {

struct ProjectConfig {
  std::string id;
  std::filesystem::path issues;
  std::filesystem::path repo;
  std::filesystem::path versions;  // .json = tracker version array, otherwise CSV
  std::string branch;              // empty = repository HEAD
  std::vector<std::string> exclude;
  std::vector<std::string> extensions{".java"};
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  std::optional<std::filesystem::path> szz_import;
  std::optional<std::filesystem::path> catalog;
};

struct PipelineConfig {
  std::filesystem::path out{"out"};
  /// P used for ColdStart when no other project supplies one.
  double coldstart_p = 1.8089;
  double alpha = 0.05;
  SelectionThresholds thresholds;
  std::vector<ProjectConfig> projects;
};

/// Parses the key = value config format. Global keys come first; each
/// `[project ID]` header opens a project section. Relative paths resolve
/// against `base_dir`. Throws ParseError naming the offending line.
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Renders a config back into the file format (paths as given).
std::string render_config(const PipelineConfig& config);

/// Throws IoError listing every configured input path that does not exist.
void check_inputs(const PipelineConfig& config);

}  // namespace dlm
