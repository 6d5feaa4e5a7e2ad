#include "dlm/pipeline.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <optional>

#include "dlm/avlabel.hpp"
#include "dlm/classlabel.hpp"
#include "dlm/csv.hpp"
#include "dlm/evalstats.hpp"
#include "dlm/features.hpp"
#include "dlm/fselect.hpp"
#include "dlm/git.hpp"
#include "dlm/ingest.hpp"
#include "dlm/lifecycle.hpp"
#include "dlm/parallel.hpp"
#include "dlm/stability.hpp"
#include "dlm/szz.hpp"

namespace dlm {

namespace fs = std::filesystem;

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::ingest: return "ingest";
    case Stage::lifecycle: return "lifecycle";
    case Stage::szz: return "szz";
    case Stage::avlabel: return "avlabel";
    case Stage::classlabel: return "classlabel";
    case Stage::features: return "features";
    case Stage::fselect: return "fselect";
    case Stage::evalstats: return "evalstats";
    case Stage::stability: return "stability";
  }
  return "?";
}

namespace {

constexpr Stage kStages[] = {Stage::ingest,   Stage::lifecycle, Stage::szz,       Stage::avlabel,  Stage::classlabel,
                             Stage::features, Stage::fselect,   Stage::evalstats, Stage::stability};
constexpr const char* kStageVersion = "1";
constexpr std::string_view kGranularities[] = {"version", "class", "feature"};
constexpr std::string_view kMetricNames[] = {"precision", "recall", "f1", "kappa", "mcc"};

std::string flag(bool b) { return b ? "1" : "0"; }

struct Exclusion {
  std::string issue_key;
  std::string stage;
  std::string reason;
};

struct ProjectState {
  const ProjectConfig* config = nullptr;

  std::unique_ptr<GitRepository> repo;
  std::vector<CommitRecord> commits;
  std::unique_ptr<CommitIndex> index;
  std::vector<IssueRecord> fixed;
  std::vector<IssueCommitLink> links;
  std::vector<Exclusion> exclusions;

  VersionTimeline timeline;
  ProjectDefects defects;
  std::vector<DefectLifecycle> usable;  // consistent, fix-date order

  std::map<SzzSource, std::vector<IntroducingCommitSet>> szz_sets;
  LabelingInputs inputs;
  ProportionTrace trace;
  std::vector<Method> methods;  // configured and available, reporting order
  std::map<Method, std::vector<AffectedLabeling>> labelings;
  std::vector<AffectedLabeling> truth;

  std::map<std::string, PathSet> touched;
  ClassUniverse universes;
  std::vector<DefectivenessMatrix> matrices;  // truth first, then methods
  DefectivenessMatrix truth_matrix;

  FeatureCatalog catalog;
  std::size_t retained = 0;
  std::vector<FeatureRow> feature_rows;
  // method name -> R -> selection
  std::map<std::string, std::map<VersionIndex, SelectionResult>> selections;

  const std::string& id() const { return config->id; }
  bool participates() const { return !usable.empty(); }
};

class OutputSink {
public:
  explicit OutputSink(fs::path root) : root_(std::move(root)) {}

  void write(const std::string& relative, const csv::Writer& writer) {
    write_raw(relative, writer.text(), writer.rows());
  }
  void write_raw(const std::string& relative, std::string_view text, std::size_t rows) {
    const fs::path path = root_ / relative;
    fs::create_directories(path.parent_path());
    write_file_atomic(path, text);
    files_[relative] = rows;
  }
  std::vector<OutputFile> files() const {
    std::vector<OutputFile> out;
    for (const auto& [path, rows] : files_) out.push_back({path, rows});
    return out;
  }
  const fs::path& root() const { return root_; }

private:
  fs::path root_;
  std::map<std::string, std::size_t> files_;
};

struct MetricCell {
  std::string project;
  std::string method;
  std::string granularity;
  ConfusionCounts counts;
  AccuracyReport report;
};

std::optional<double> metric_value(const AccuracyReport& r, std::string_view metric) {
  if (metric == "precision") return r.precision;
  if (metric == "recall") return r.recall;
  if (metric == "f1") return r.f1;
  if (metric == "kappa") return r.kappa;
  return r.mcc;
}

class Pipeline {
public:
  Pipeline(const PipelineConfig& config, const PipelineOptions& options)
      : config_(config), options_(options), sink_(config.out) {
    for (const auto& p : config.projects) {
      projects_.emplace_back();
      projects_.back().config = &p;
    }
  }

  PipelineResult run() {
    std::vector<Stage> plan;
    for (const Stage s : kStages) {
      if (options_.run_all || s <= options_.until) plan.push_back(s);
    }
    if (!options_.run_all && options_.until == Stage::stability) {
      plan = {Stage::ingest, Stage::lifecycle, Stage::stability};
    }

    for (const Stage s : plan) {
      status_[s] = "pending";
    }
    for (const Stage s : plan) {
      try {
        execute(s);
        if (status_[s] == "pending") status_[s] = "done";
      } catch (const SelectionRefused& e) {
        status_[s] = "refused";
        write_manifest("refused", e.what());
        throw;
      } catch (const std::exception& e) {
        status_[s] = "failed";
        failed_stage_ = s;
        write_manifest("failed", e.what());
        throw PipelineError(s, e.what());
      }
    }
    write_manifest("complete", {});
    return {sink_.files(), notices_};
  }

private:
  void notice(std::string msg) {
    spdlog::info("{}", msg);
    notices_.push_back(std::move(msg));
  }

  bool any_participant() const {
    return std::any_of(projects_.begin(), projects_.end(), [](const ProjectState& p) { return p.participates(); });
  }

  void execute(Stage s) {
    switch (s) {
      case Stage::ingest: return ingest();
      case Stage::lifecycle: return lifecycle();
      case Stage::stability: return stability();
      default: break;
    }
    if (!any_participant()) {
      if (!empty_notice_) notice("no project has a usable defect; labeling and later stages skipped");
      empty_notice_ = true;
      status_[s] = "skipped";
      return;
    }
    switch (s) {
      case Stage::szz: return szz();
      case Stage::avlabel: return avlabel();
      case Stage::classlabel: return classlabel();
      case Stage::features: return features();
      case Stage::fselect: return fselect();
      case Stage::evalstats: return evalstats();
      default: return;
    }
  }

  // ---- ingest ---------------------------------------------------------------

  void ingest() {
    csv::Writer links({"project", "issue_key", "commit_id"});
    for (auto& p : projects_) {
      const auto& cfg = *p.config;
      const auto exported = parse_issue_export(read_text_file(cfg.issues));
      for (const auto& skip : exported.skipped) {
        p.exclusions.push_back({skip.key.empty() ? "#" + std::to_string(skip.index) : skip.key, "ingest", skip.reason});
      }
      p.fixed = filter_fixed_defects(exported.issues);
      p.repo = std::make_unique<GitRepository>(cfg.repo, cfg.branch);
      p.commits = extract_commits(*p.repo);
      p.index = std::make_unique<CommitIndex>(p.commits);
      std::set<std::string> keys;
      for (const auto& issue : p.fixed) keys.insert(issue.key);
      p.links = link_commits_to_issues(p.commits, keys);
      for (const auto& link : p.links) {
        if (link.commit_ids.empty()) links.add({p.id(), link.issue_key, ""});
        for (const auto& id : link.commit_ids) links.add({p.id(), link.issue_key, id});
      }
      spdlog::info("{}: {} fixed defects, {} commits", p.id(), p.fixed.size(), p.commits.size());
    }
    sink_.write("links.csv", links);
  }

  // ---- lifecycle ------------------------------------------------------------

  void lifecycle() {
    csv::Writer lifecycles(
        {"project", "issue_key", "created", "fix_commit", "fix_timestamp", "ov", "fv", "iv", "available", "consistent"});
    std::vector<ProjectDefects> all;
    for (auto& p : projects_) {
      const auto& cfg = *p.config;
      const std::string text = read_text_file(cfg.versions);
      const auto raw = cfg.versions.extension() == ".json" ? parse_versions_json(text) : parse_versions_csv(text);
      p.timeline = build_timeline(raw, cfg.exclude);

      std::map<std::string, const IssueRecord*> by_key;
      for (const auto& issue : p.fixed) by_key[issue.key] = &issue;

      p.defects.project = p.id();
      p.defects.fixed_defects = p.fixed.size();
      p.defects.version_count = p.timeline.size();
      for (const auto& link : p.links) {
        try {
          auto d = derive_lifecycle(*by_key.at(link.issue_key), link, *p.index, p.timeline);
          if (!post_release_filter(d)) {
            p.exclusions.push_back({d.issue_key, "lifecycle", "introduced in its fixing version"});
            continue;
          }
          p.defects.defects.push_back(std::move(d));
        } catch (const Excluded& e) {
          p.exclusions.push_back({e.issue_key(), "lifecycle", e.reason()});
        }
      }
      order_by_fix_date(p.defects.defects);
      for (const auto& d : p.defects.defects) {
        const auto u = usability(d);
        if (u.consistent) p.usable.push_back(d);
        lifecycles.add({p.id(), d.issue_key, format_timestamp(d.created), d.fix_commits.back(),
                        format_timestamp(d.fix_timestamp), std::to_string(d.ov), std::to_string(d.fv),
                        d.ground_truth_iv() ? std::to_string(*d.ground_truth_iv()) : std::string(csv::kUndefined),
                        flag(u.available), flag(u.consistent)});
      }
      if (p.usable.empty()) notice(p.id() + ": no defect with available and consistent affected versions");
      all.push_back(p.defects);
    }
    sink_.write("lifecycles.csv", lifecycles);

    csv::Writer exclusions({"project", "issue_key", "stage", "reason"});
    for (const auto& p : projects_) {
      for (const auto& e : p.exclusions) exclusions.add({p.id(), e.issue_key, e.stage, e.reason});
    }
    sink_.write("exclusions.csv", exclusions);

    const auto summary = rq1_summary(all);
    csv::Writer rq1({"project", "defects", "linked", "pct_available", "pct_consistent"});
    for (const auto& r : summary.projects) {
      rq1.add({r.project, std::to_string(r.defects), std::to_string(r.linked), csv::number(r.pct_available),
               csv::number(r.pct_consistent)});
    }
    const auto& t = summary.totals;
    rq1.add({t.project, std::to_string(t.defects), std::to_string(t.linked), csv::number(t.pct_available),
             csv::number(t.pct_consistent)});
    sink_.write("rq1.csv", rq1);

    csv::Writer selection({"project", "usable_defects", "versions", "pct_consistent", "passes", "failures"});
    std::string refused;
    for (const auto& r : summary.projects) {
      const auto failures = selection_failures(r, config_.thresholds);
      std::string joined;
      for (const auto& f : failures) joined += (joined.empty() ? "" : "; ") + f;
      selection.add({r.project, std::to_string(r.consistent), std::to_string(r.version_count),
                     csv::number(r.pct_consistent), flag(failures.empty()), joined});
      if (!failures.empty()) refused += "\n  " + r.project + ": " + joined;
    }
    sink_.write("project_selection.csv", selection);
    if (options_.enforce_selection && !refused.empty()) {
      throw SelectionRefused("projects below the selection thresholds:" + refused);
    }
  }

  // ---- szz ------------------------------------------------------------------

  void szz() {
    csv::Writer out({"project", "issue_key", "source", "commit_id", "commit_timestamp", "version_index"});
    for (auto& p : projects_) {
      if (!p.participates()) continue;
      const auto wants = [&](std::initializer_list<Method> ms) {
        return std::any_of(ms.begin(), ms.end(), [&](Method m) {
          return std::find(p.config->methods.begin(), p.config->methods.end(), m) != p.config->methods.end();
        });
      };

      if (wants({Method::szz_b, Method::szz_b_plus})) {
        Blamer blamer(*p.repo);
        SzzDiagnostics diag;
        SzzIvMap ivs;
        auto& sets = p.szz_sets[SzzSource::basic];
        for (const auto& d : p.usable) {
          sets.push_back(introducing_commits(d, *p.index, blamer, options_.jobs, &diag));
          ivs[d.issue_key] = szz_iv(sets.back(), p.timeline);
        }
        for (const auto& m : diag.messages) spdlog::warn("{}: {}", p.id(), m);
        p.inputs.szz_b = std::move(ivs);
      }

      const bool wants_u = wants({Method::szz_u, Method::szz_u_plus});
      const bool wants_ra = wants({Method::szz_ra, Method::szz_ra_plus});
      if (wants_u || wants_ra) {
        if (!p.config->szz_import) {
          notice(p.id() + ": no szz_import configured; SZZ_U and SZZ_RA methods skipped");
        } else {
          const auto imported = import_external_szz(read_text_file(*p.config->szz_import), *p.index);
          for (const auto& skip : imported.skipped) {
            spdlog::warn("{}: szz import row {} skipped: {}", p.id(), skip.index, skip.reason);
          }
          std::set<std::string> usable_keys;
          for (const auto& d : p.usable) usable_keys.insert(d.issue_key);
          SzzIvMap u, ra;
          for (const auto& d : p.usable) u[d.issue_key] = ra[d.issue_key] = std::nullopt;
          for (const auto& set : imported.sets) {
            if (!usable_keys.contains(set.issue_key)) continue;
            const DefectLifecycle& d = *std::find_if(p.usable.begin(), p.usable.end(),
                                                     [&](const auto& x) { return x.issue_key == set.issue_key; });
            auto kept = discard_after(set, d.fix_timestamp);
            auto& target = set.source == SzzSource::imported_u ? u : ra;
            target[d.issue_key] = szz_iv(kept, p.timeline);
            p.szz_sets[set.source].push_back(std::move(kept));
          }
          if (wants_u) p.inputs.szz_u = std::move(u);
          if (wants_ra) p.inputs.szz_ra = std::move(ra);
        }
      }

      for (const auto& [source, sets] : p.szz_sets) {
        for (const auto& set : sets) {
          for (const auto& c : set.commits) {
            const auto v = p.timeline.version_of_timestamp(c.timestamp);
            out.add({p.id(), set.issue_key, std::string(szz_source_name(source)), c.id, format_timestamp(c.timestamp),
                     v ? std::to_string(*v) : std::string(csv::kUndefined)});
          }
        }
      }
    }
    sink_.write("szz_commits.csv", out);
  }

  // ---- avlabel --------------------------------------------------------------

  void avlabel() {
    std::map<std::string, double> project_means;
    for (const auto& p : projects_) {
      if (!p.participates()) continue;
      double sum = 0.0;
      for (const auto& d : p.usable) sum += proportion_of_defect(d);
      project_means[p.id()] = sum / static_cast<double>(p.usable.size());
    }

    csv::Writer labels({"project", "issue_key", "method", "version_index", "affected"});
    csv::Writer proportions({"project", "issue_key", "method", "p", "source", "support", "estimated_iv"});
    for (auto& p : projects_) {
      if (!p.participates()) continue;
      if (project_means.size() > 1) {
        p.inputs.coldstart = coldstart_p(project_means, p.id());
      } else {
        p.inputs.coldstart = {config_.coldstart_p, EstimateSource::constant, 0};
        notice(p.id() + ": ColdStart uses the configured constant P " + csv::number(config_.coldstart_p));
      }
      for (const Method m : kAllMethods) {
        const bool configured =
            std::find(p.config->methods.begin(), p.config->methods.end(), m) != p.config->methods.end();
        if (configured && method_available(m, p.inputs)) p.methods.push_back(m);
      }
      p.labelings = label_defects(p.usable, p.methods, p.inputs);
      p.trace = trace_proportions(p.usable, p.inputs.coldstart);
      for (const auto& d : p.usable) p.truth.push_back(ground_truth_labeling(d));

      auto emit = [&](const std::vector<AffectedLabeling>& ls) {
        for (const auto& l : ls) {
          for (VersionIndex v = 1; v < l.fv(); ++v) {
            labels.add({p.id(), l.issue_key(), l.method(), std::to_string(v), flag(l.affected(v))});
          }
        }
      };
      emit(p.truth);
      for (const Method m : p.methods) emit(p.labelings.at(m));

      for (std::size_t i = 0; i < p.usable.size(); ++i) {
        const auto& d = p.usable[i];
        const std::pair<Method, const ProportionEstimate*> used[] = {
            {Method::proportion_coldstart, &p.inputs.coldstart},
            {Method::proportion_increment, &p.trace.increment[i]},
            {Method::proportion_movingwindow, &p.trace.window[i]},
        };
        for (const auto& [m, est] : used) {
          if (std::find(p.methods.begin(), p.methods.end(), m) == p.methods.end()) continue;
          proportions.add({p.id(), d.issue_key, std::string(method_name(m)), csv::number(est->value),
                           std::string(estimate_source_name(est->source)), std::to_string(est->support),
                           csv::number(estimate_iv(d.fv, d.ov, est->value))});
        }
      }
    }
    sink_.write("av_labels.csv", labels);
    sink_.write("proportions.csv", proportions);
  }

  // ---- classlabel -----------------------------------------------------------

  void classlabel() {
    csv::Writer out({"project", "method", "version_index", "path", "defective"});
    for (auto& p : projects_) {
      if (!p.participates()) continue;
      const ExtensionFilter filter(p.config->extensions);
      for (const auto& d : p.usable) {
        std::vector<const CommitRecord*> fixes;
        for (const auto& id : d.fix_commits) fixes.push_back(&p.index->at(id));
        p.touched[d.issue_key] = touched_classes(fixes, filter);
      }
      const auto n = static_cast<VersionIndex>(p.timeline.size());
      std::vector<PathSet> universes(static_cast<std::size_t>(n));
      parallel_for(universes.size(), options_.jobs, [&](std::size_t i) {
        universes[i] = class_universe(*p.repo, p.commits, p.timeline, static_cast<VersionIndex>(i + 1), filter);
      });
      for (VersionIndex v = 1; v <= n; ++v) p.universes[v] = std::move(universes[static_cast<std::size_t>(v - 1)]);

      p.truth_matrix = ground_truth_classes(p.usable, p.touched, p.universes);
      p.matrices.push_back(p.truth_matrix);
      for (const Method m : p.methods) {
        p.matrices.push_back(label_classes(std::string(method_name(m)), p.labelings.at(m), p.touched, p.universes));
      }
      for (const auto& matrix : p.matrices) {
        for (const auto& [key, defective] : matrix.entries) {
          out.add({p.id(), matrix.method, std::to_string(key.version), key.path, flag(defective)});
        }
      }
    }
    sink_.write("class_labels.csv", out);
  }

  // ---- features -------------------------------------------------------------

  void features() {
    for (auto& p : projects_) {
      if (!p.participates()) continue;
      p.catalog = p.config->catalog ? FeatureCatalog::from_csv(read_text_file(*p.config->catalog))
                                    : FeatureCatalog::standard();
      p.retained = retained_versions(p.timeline.size());
      if (p.retained == 0) {
        notice(p.id() + ": fewer than two versions; no dataset retained");
        continue;
      }
      std::set<std::string> fix_ids;
      for (const auto& d : p.defects.defects) fix_ids.insert(d.fix_commits.begin(), d.fix_commits.end());
      const ExtensionFilter filter(p.config->extensions);

      std::vector<std::vector<FeatureRow>> per_version(p.retained);
      parallel_for(p.retained, options_.jobs, [&](std::size_t i) {
        per_version[i] = compute_features(*p.repo, p.commits, p.timeline, static_cast<VersionIndex>(i + 1), p.catalog,
                                          fix_ids, filter);
      });
      for (auto& rows : per_version) {
        for (auto& r : rows) p.feature_rows.push_back(std::move(r));
      }

      csv::Row header{"version", "path"};
      for (const auto& name : p.catalog.names()) header.push_back(name);
      header.push_back("defective");
      for (const auto& matrix : p.matrices) {
        for (VersionIndex r = 1; r <= static_cast<VersionIndex>(p.retained); ++r) {
          const Dataset ds = build_dataset(p.feature_rows, p.catalog, matrix, r, p.retained);
          csv::Writer w(header);
          for (const auto& row : ds.rows) {
            csv::Row fields{std::to_string(row.key.version), row.key.path};
            for (Eigen::Index c = 0; c < row.values.size(); ++c) fields.push_back(csv::number(row.values[c]));
            fields.push_back(flag(row.defective));
            w.add(fields);
          }
          sink_.write(dataset_path(p, matrix.method, r), w);
        }
      }
    }
  }

  static std::string dataset_path(const ProjectState& p, const std::string& method, VersionIndex r) {
    return "datasets/" + p.id() + "/" + method + "_R" + std::to_string(r) + ".csv";
  }

  // ---- fselect --------------------------------------------------------------

  void fselect() {
    csv::Writer out({"project", "method", "R", "selected_features", "merit"});
    for (auto& p : projects_) {
      if (!p.participates() || p.retained == 0) continue;
      for (const auto& matrix : p.matrices) {
        for (VersionIndex r = 1; r <= static_cast<VersionIndex>(p.retained); ++r) {
          const Dataset ds = build_dataset(p.feature_rows, p.catalog, matrix, r, p.retained);
          if (ds.rows.size() < 2) {
            notice(p.id() + ": " + matrix.method + " R" + std::to_string(r) + " has fewer than two rows; not selected");
            continue;
          }
          auto result = exhaustive_search(ds, options_.jobs);
          std::string joined;
          for (const auto& f : result.selected) joined += (joined.empty() ? "" : ";") + f;
          out.add({p.id(), matrix.method, std::to_string(r), joined, csv::number(result.merit)});
          p.selections[matrix.method][r] = std::move(result);
        }
      }
    }
    sink_.write("selection.csv", out);
  }

  // ---- evalstats ------------------------------------------------------------

  std::vector<MetricCell> metric_cells() const {
    std::vector<MetricCell> cells;
    for (const auto& p : projects_) {
      if (!p.participates()) continue;
      for (const Method m : p.methods) {
        const std::string name(method_name(m));
        const auto& labels = p.labelings.at(m);
        ConfusionCounts version;
        for (std::size_t i = 0; i < labels.size(); ++i) {
          const auto& pred = labels[i].flags();
          const auto& truth = p.truth[i].flags();
          version += confusion(std::vector<bool>(pred.begin(), pred.end() - 1),
                               std::vector<bool>(truth.begin(), truth.end() - 1));
        }
        cells.push_back({p.id(), name, "version", version, accuracy_metrics(version)});

        if (!p.matrices.empty()) {
          const auto& matrix = *std::find_if(p.matrices.begin(), p.matrices.end(),
                                             [&](const DefectivenessMatrix& x) { return x.method == name; });
          ConfusionCounts cls;
          for (const auto& [key, actual] : p.truth_matrix.entries) {
            const bool predicted = matrix.defective(key);
            if (predicted) (actual ? cls.tp : cls.fp)++;
            else (actual ? cls.fn : cls.tn)++;
          }
          cells.push_back({p.id(), name, "class", cls, accuracy_metrics(cls)});
        }

        const auto mine = p.selections.find(name);
        const auto actual = p.selections.find(std::string(kActual));
        if (mine != p.selections.end() && actual != p.selections.end()) {
          ConfusionCounts feat;
          const auto names = p.catalog.names();
          for (const auto& [r, sel] : mine->second) {
            auto a = actual->second.find(r);
            if (a == actual->second.end()) continue;
            feat += selection_confusion(sel.selected, a->second.selected, names);
          }
          cells.push_back({p.id(), name, "feature", feat, accuracy_metrics(feat)});
        }
      }
    }
    return cells;
  }

  void evalstats() {
    const auto cells = metric_cells();
    csv::Writer metrics(
        {"project", "method", "granularity", "tp", "fp", "fn", "tn", "precision", "recall", "f1", "kappa", "mcc"});
    for (const auto& c : cells) {
      metrics.add({c.project, c.method, c.granularity, std::to_string(c.counts.tp), std::to_string(c.counts.fp),
                   std::to_string(c.counts.fn), std::to_string(c.counts.tn), csv::number(c.report.precision),
                   csv::number(c.report.recall), csv::number(c.report.f1), csv::number(c.report.kappa),
                   csv::number(c.report.mcc)});
    }
    sink_.write("metrics.csv", metrics);

    csv::Writer kw({"granularity", "metric", "methods", "observations", "excluded", "h", "dof", "p"});
    csv::Writer pairs({"granularity", "metric", "method_a", "method_b", "z", "p", "p_adjusted", "significant"});
    csv::Writer ranks({"granularity", "metric", "method", "mean", "rank", "comment"});
    for (const auto granularity : kGranularities) {
      for (const auto metric : kMetricNames) {
        std::vector<std::string> methods;
        std::vector<std::vector<double>> groups;
        std::size_t excluded = 0;
        for (const Method m : kAllMethods) {
          const std::string name(method_name(m));
          std::vector<double> values;
          bool seen = false;
          for (const auto& c : cells) {
            if (c.method != name || c.granularity != granularity) continue;
            seen = true;
            if (auto v = metric_value(c.report, metric)) values.push_back(*v);
            else ++excluded;
          }
          if (!seen || values.empty()) continue;
          methods.push_back(name);
          groups.push_back(std::move(values));
        }
        if (groups.size() < 2) continue;

        const auto h = kruskal_wallis(groups);
        std::size_t n = 0;
        for (const auto& g : groups) n += g.size();
        kw.add({std::string(granularity), std::string(metric), std::to_string(groups.size()), std::to_string(n),
                std::to_string(excluded), csv::number(h.h), std::to_string(h.dof), csv::number(h.p)});

        SignificanceMap sig;
        for (const auto& c : dunn_posthoc(groups)) {
          const bool significant = h.p < config_.alpha && c.p_adjusted < config_.alpha;
          if (significant) sig.mark(methods[c.first], methods[c.second]);
          pairs.add({std::string(granularity), std::string(metric), methods[c.first], methods[c.second],
                     csv::number(c.z), csv::number(c.p), csv::number(c.p_adjusted), flag(significant)});
        }
        std::vector<std::pair<std::string, double>> means;
        for (std::size_t i = 0; i < groups.size(); ++i) {
          const double mean = std::accumulate(groups[i].begin(), groups[i].end(), 0.0) /
                              static_cast<double>(groups[i].size());
          means.emplace_back(methods[i], mean);
        }
        for (const auto& row : rank_methods(means, sig)) {
          ranks.add({std::string(granularity), std::string(metric), row.method, csv::number(row.mean),
                     csv::number(row.rank), row.comment});
        }
      }
    }
    sink_.write("stats_kruskal.csv", kw);
    sink_.write("stats_pairwise.csv", pairs);
    sink_.write("rank_table.csv", ranks);
  }

  // ---- stability ------------------------------------------------------------

  void stability() {
    std::vector<ProjectDefects> all;
    for (const auto& p : projects_) all.push_back(p.defects);
    csv::Writer out({"project", "defects", "stdv_iv", "stdv_ov", "stdv_fv", "stdv_p"});
    if (!any_participant()) {
      notice("no consistent defect; stability report skipped");
      status_[Stage::stability] = "skipped";
      return;
    }
    const auto report = stability_report(all);
    auto add = [&](const StabilityRow& r) {
      out.add({r.project, std::to_string(r.defects), csv::number(r.iv), csv::number(r.ov), csv::number(r.fv),
               csv::number(r.p)});
    };
    for (const auto& r : report.projects) add(r);
    add(report.across);
    sink_.write("stability.csv", out);
  }

  // ---- manifest -------------------------------------------------------------

  void write_manifest(const std::string& status, const std::string& error) {
    nlohmann::ordered_json m;
    m["tool"] = "dlm";
    m["format"] = 1;
    m["status"] = status;
    if (!error.empty()) m["error"] = error;
    if (failed_stage_) m["failed_stage"] = stage_name(*failed_stage_);
    auto stages = nlohmann::ordered_json::array();
    for (const Stage s : kStages) {
      auto it = status_.find(s);
      if (it == status_.end()) continue;
      stages.push_back({{"name", stage_name(s)}, {"version", kStageVersion}, {"status", it->second}});
    }
    m["stages"] = stages;

    nlohmann::ordered_json cfg;
    cfg["coldstart_p"] = config_.coldstart_p;
    cfg["alpha"] = config_.alpha;
    cfg["enforce_selection"] = options_.enforce_selection;
    cfg["thresholds"] = {{"min_usable_defects", config_.thresholds.min_usable_defects},
                         {"min_versions", config_.thresholds.min_versions},
                         {"min_pct_consistent", config_.thresholds.min_pct_consistent}};
    auto projects = nlohmann::ordered_json::array();
    for (const auto& p : config_.projects) {
      nlohmann::ordered_json pj;
      pj["id"] = p.id;
      pj["issues"] = p.issues.generic_string();
      pj["repo"] = p.repo.generic_string();
      pj["versions"] = p.versions.generic_string();
      pj["branch"] = p.branch;
      pj["exclude"] = p.exclude;
      pj["extensions"] = p.extensions;
      std::vector<std::string> methods;
      for (const Method meth : p.methods) methods.emplace_back(method_name(meth));
      pj["methods"] = methods;
      pj["szz_import"] = p.szz_import ? p.szz_import->generic_string() : "";
      pj["catalog"] = p.catalog ? p.catalog->generic_string() : "";
      projects.push_back(pj);
    }
    cfg["projects"] = projects;
    m["config"] = cfg;
    m["notes"] = {{"feature_selection_correlation", "pearson/point-biserial on raw values"},
                  {"metric_undefined_marker", csv::kUndefined},
                  {"significance", "Kruskal-Wallis p < alpha and Holm-adjusted Dunn p < alpha"}};
    auto files = nlohmann::ordered_json::array();
    for (const auto& f : sink_.files()) files.push_back({{"path", f.path}, {"rows", f.rows}});
    m["files"] = files;
    m["notices"] = notices_;
    fs::create_directories(sink_.root());
    write_file_atomic(sink_.root() / "manifest.json", m.dump(2) + "\n");
  }

  const PipelineConfig& config_;
  PipelineOptions options_;
  OutputSink sink_;
  std::vector<ProjectState> projects_;
  std::map<Stage, std::string> status_;
  std::optional<Stage> failed_stage_;
  std::vector<std::string> notices_;
  bool empty_notice_ = false;
};

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, const PipelineOptions& options) {
  check_inputs(config);
  Pipeline pipeline(config, options);
  return pipeline.run();
}

}  // namespace dlm
