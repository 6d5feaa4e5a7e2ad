#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dlm/common.hpp"
#include "dlm/config.hpp"

namespace dlm {

/// Pipeline stages in execution order.
enum class Stage { ingest, lifecycle, szz, avlabel, classlabel, features, fselect, evalstats, stability };

std::string_view stage_name(Stage s);

struct PipelineOptions {
  /// Last stage to run. `stability` only needs the life cycles, so asking for
  /// it alone skips the labeling stages; `run_all` executes everything.
  Stage until = Stage::stability;
  bool run_all = true;
  int jobs = 1;
  bool enforce_selection = false;
};

struct OutputFile {
  std::string path;  // relative to the output directory
  std::size_t rows = 0;
};

struct PipelineResult {
  std::vector<OutputFile> files;
  std::vector<std::string> notices;
};

/// A stage threw; outputs of earlier stages and a failure manifest remain.
class PipelineError : public Error {
public:
  PipelineError(Stage stage, const std::string& what)
      : Error(std::string(stage_name(stage)) + ": " + what), stage_(stage) {}
  Stage stage() const { return stage_; }

private:
  Stage stage_;
};

/// Raised under --enforce-selection when a project misses the thresholds.
class SelectionRefused : public Error {
public:
  using Error::Error;
};

/// Runs the configured stages for every project and writes their CSV outputs
/// plus manifest.json under `config.out`. Every file is written atomically and
/// outputs do not depend on `options.jobs`.
PipelineResult run_pipeline(const PipelineConfig& config, const PipelineOptions& options = {});

}  // namespace dlm
