// dlm: defect life-cycle mining command line.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <iostream>

#include "dlm/config.hpp"
#include "dlm/log.hpp"
#include "dlm/pipeline.hpp"
#include "dlm/synthetic.hpp"

namespace {

struct StageCommand {
  const char* name;
  const char* help;
  dlm::Stage until;
  bool all;
};

constexpr StageCommand kCommands[] = {
    {"ingest", "Parse the issue export and link commits to issues", dlm::Stage::ingest, false},
    {"rq1", "Derive life cycles and report AV availability and consistency", dlm::Stage::lifecycle, false},
    {"label-av", "Run SZZ and label affected versions with every method", dlm::Stage::avlabel, false},
    {"label-classes", "Label version-class pairs as defective", dlm::Stage::classlabel, false},
    {"features", "Compute features and write the per-release datasets", dlm::Stage::features, false},
    {"select-features", "Run exhaustive CFS feature selection on every dataset", dlm::Stage::fselect, false},
    {"evaluate", "Compute accuracy metrics and the statistical comparison", dlm::Stage::evalstats, false},
    {"stability", "Report the spread of IV, OV, FV and P", dlm::Stage::stability, false},
    {"run", "Run the full pipeline", dlm::Stage::stability, true},
};

}  // namespace

int main(int argc, char** argv) {
  dlm::init_logging();

  CLI::App app{"Defect life-cycle mining: affected-version labeling and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  bool enforce = false;
  app.add_option("--config", config_path, "Pipeline configuration file");
  app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--enforce-selection", enforce, "Refuse projects below the selection thresholds");

  const StageCommand* chosen = nullptr;
  for (const auto& cmd : kCommands) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->callback([&chosen, &cmd] { chosen = &cmd; });
  }

  dlm::SyntheticSpec spec;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic project with known life cycles");
  synth->add_option("--seed", spec.seed, "Random seed")->capture_default_str();
  synth->add_option("--project", spec.project, "Project id and issue key prefix")->capture_default_str();
  synth->add_option("--versions", spec.versions, "Released versions")->capture_default_str();
  synth->add_option("--defects", spec.defects, "Planted defects")->capture_default_str();
  synth->add_option("--classes", spec.classes, "Classes")->capture_default_str();
  synth->add_option("--p-mean", spec.p_mean, "Mean proportion P")->capture_default_str();
  synth->add_option("--p-sd", spec.p_sd, "Standard deviation of P")->capture_default_str();
  synth->add_option("--noise", spec.noise_commits, "Unrelated commits")->capture_default_str();
  synth->add_option("--unavailable-rate", spec.unavailable_rate, "Share of defects without AVs")->capture_default_str();
  synth->add_option("--inconsistent-rate", spec.inconsistent_rate, "Share of defects with inconsistent AVs")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      if (out_dir.empty()) throw CLI::RequiredError("--out");
      const auto project = dlm::generate_synthetic(spec);
      const auto m = dlm::materialize_synthetic(project, out_dir);
      std::cout << "repository: " << m.repo.string() << "\n"
                << "config:     " << m.config.string() << "\n"
                << "defects:    " << project.defects.size() << "\n";
      return 0;
    }

    if (config_path.empty()) throw CLI::RequiredError("--config");
    auto config = dlm::load_config(config_path);
    if (!out_dir.empty()) config.out = out_dir;
    dlm::PipelineOptions options;
    options.until = chosen->until;
    options.run_all = chosen->all;
    options.jobs = jobs;
    options.enforce_selection = enforce;
    const auto result = dlm::run_pipeline(config, options);
    for (const auto& f : result.files) std::cout << f.path << " (" << f.rows << " rows)\n";
    for (const auto& n : result.notices) std::cout << "note: " << n << "\n";
    return 0;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const dlm::SelectionRefused& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
