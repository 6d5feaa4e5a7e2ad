#include "dlm/synthetic.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "dlm/config.hpp"
#include "dlm/csv.hpp"
#include "dlm/git.hpp"

namespace dlm {

namespace fs = std::filesystem;

namespace {

using namespace std::chrono_literals;
using Days = std::chrono::days;

constexpr int kMaxAttempts = 1000;
constexpr int kInitialBodyLines = 8;

const char* const kAuthors[] = {
    "Ana Lima <ana@synth.example>",
    "Bo Chen <bo@synth.example>",
    "Chidi Okafor <chidi@synth.example>",
    "Dana Weiss <dana@synth.example>",
};

enum class LineKind { structural, plain, bug };

struct Line {
  std::string text;
  int owner = 0;
  LineKind kind = LineKind::plain;
  int defect = -1;
};

enum class EventKind { init, create, intro, fix_part, fix, noise, other, unreleased };

struct Event {
  Timestamp time;
  int seq = 0;
  EventKind kind = EventKind::noise;
  int arg = 0;
};

struct FixPlan {
  bool addition_only = false;
  bool remove_old_line = false;
  bool two_commits = false;
  bool secondary = false;
  bool readme = false;
  Timestamp part_time;
  Timestamp time;
};

struct ExtraIssue {
  std::string key;
  std::string type;
  Timestamp created;
  std::optional<int> fix_version;  // index into names (may be the unreleased one)
};

class Generator {
public:
  explicit Generator(const SyntheticSpec& spec) : spec_(spec), rng_(spec.seed) {}

  SyntheticProject run() {
    validate();
    project_.spec = spec_;
    const Timestamp base = parse_timestamp("2015-01-01T00:00:00Z");
    init_time_ = base + 1h;
    for (int v = 0; v <= spec_.versions + 1; ++v) release_.push_back(base + Days(30 * v));
    release_[0] = base + 2h;  // lower bound of the first interval
    for (int v = 1; v <= spec_.versions; ++v) {
      project_.releases.emplace_back(version_name(v), release_[static_cast<std::size_t>(v)]);
    }

    plan();
    simulate();
    project_.issues_json = issues_json();
    project_.versions_csv = versions_csv();
    return std::move(project_);
  }

private:
  void validate() const {
    if (spec_.versions < 2) throw Error("synthetic spec needs at least 2 versions");
    if (spec_.classes < 1) throw Error("synthetic spec needs at least one class");
    if (spec_.defects < 0 || spec_.noise_commits < 0 || spec_.other_issues < 0 || spec_.unlinked_defects < 0 ||
        spec_.unreleased_fixes < 0) {
      throw Error("synthetic spec counts must be non-negative");
    }
    for (double r : {spec_.unavailable_rate, spec_.inconsistent_rate}) {
      if (!(r >= 0.0 && r <= 1.0)) throw Error("synthetic spec rates must lie in [0, 1]");
    }
    if (spec_.p_sd < 0.0) throw Error("synthetic spec p_sd must be non-negative");
  }

  static std::string version_name(int v) { return std::to_string(v) + ".0"; }
  Timestamp R(int v) const { return release_.at(static_cast<std::size_t>(v)); }

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }
  Timestamp between(Timestamp lo, Timestamp hi) {
    const auto span = (hi - lo).count();
    return lo + std::chrono::seconds(std::uniform_int_distribution<long long>(0, std::max<long long>(span, 0))(rng_));
  }
  std::string author() { return kAuthors[uniform(0, 3)]; }

  int version_of(Timestamp t) const {
    for (int v = 1; v <= spec_.versions; ++v) {
      if (R(v) >= t) return v;
    }
    return 0;
  }

  void add_event(Timestamp t, EventKind kind, int arg) { events_.push_back({t, static_cast<int>(events_.size()), kind, arg}); }

  // ---- planning -------------------------------------------------------------

  void plan() {
    const int initial = std::max(1, static_cast<int>(std::ceil(0.7 * spec_.classes)));
    add_event(init_time_, EventKind::init, initial);
    for (int c = initial; c < spec_.classes; ++c) {
      add_event(between(R(0), R(std::max(1, spec_.versions - 1))), EventKind::create, c);
    }

    const int n = spec_.versions;
    std::normal_distribution<double> p_dist(spec_.p_mean, spec_.p_sd);
    for (int d = 0; d < spec_.defects; ++d) {
      SyntheticDefect def;
      def.key = spec_.project + "-" + std::to_string(d + 1);
      bool placed = false;
      for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
        const double p = spec_.p_sd > 0.0 ? p_dist(rng_) : spec_.p_mean;
        const int fv = uniform(2, n);
        const int ov = uniform(1, fv - 1);
        const int iv = static_cast<int>(std::lround(fv - (fv - ov) * p));
        if (iv >= 1 && iv <= ov) {
          def.iv = iv;
          def.ov = ov;
          def.fv = fv;
          placed = true;
        }
      }
      if (!placed) {
        throw Error("infeasible synthetic spec: no life cycle with P near " + csv::number(spec_.p_mean) + " fits " +
                    std::to_string(n) + " versions");
      }

      if (chance(spec_.unavailable_rate)) {
        def.available = def.consistent = false;
      } else if (chance(spec_.inconsistent_rate) && def.fv - def.ov >= 2) {
        def.consistent = false;
        for (int v = def.ov + 1; v < def.fv; ++v) def.tracker_avs.push_back(v);
      }
      if (def.consistent) {
        for (int v = def.iv; v < def.fv; ++v) def.tracker_avs.push_back(v);
      }

      def.created = R(def.ov) + std::chrono::seconds(static_cast<long long>(
                                    std::uniform_real_distribution<double>(0.05, 0.5)(rng_) * 30 * 86400));
      const Timestamp intro_lo = def.iv == 1 ? R(0) + 1h : R(def.iv - 1) + 1h;
      add_event(between(intro_lo, R(def.iv) - 1h), EventKind::intro, d);

      FixPlan fix;
      const Timestamp fix_lo = std::max(def.created, R(def.fv - 1)) + 1h;
      fix.time = between(fix_lo, R(def.fv) - 1h);
      fix.addition_only = chance(0.1);
      fix.remove_old_line = !fix.addition_only && chance(0.3);
      fix.two_commits = chance(0.2) && fix.time - fix_lo > 120s;
      fix.secondary = chance(0.3);
      fix.readme = chance(0.2);
      if (fix.two_commits) {
        fix.part_time = between(fix_lo, fix.time - 60s);
        add_event(fix.part_time, EventKind::fix_part, d);
      }
      add_event(fix.time, EventKind::fix, d);
      project_.defects.push_back(std::move(def));
      fixes_.push_back(fix);
    }

    for (int k = 0; k < spec_.noise_commits; ++k) {
      add_event(between(R(0), R(n) + Days(10)), EventKind::noise, k);
    }
    int next_key = spec_.defects + 1;
    for (int j = 0; j < spec_.other_issues; ++j) {
      const Timestamp t = between(R(0), R(n));
      extra_.push_back({spec_.project + "-" + std::to_string(next_key++), "Improvement", t - Days(2), version_of(t)});
      add_event(t, EventKind::other, static_cast<int>(extra_.size()) - 1);
    }
    for (int j = 0; j < spec_.unlinked_defects; ++j) {
      extra_.push_back({spec_.project + "-" + std::to_string(next_key++), "Bug", between(R(1), R(n)), std::nullopt});
    }
    for (int j = 0; j < spec_.unreleased_fixes; ++j) {
      const Timestamp t = between(R(n) + Days(1), R(n) + Days(20));
      extra_.push_back({spec_.project + "-" + std::to_string(next_key++), "Bug", R(n) - Days(5), n + 1});
      add_event(t, EventKind::unreleased, static_cast<int>(extra_.size()) - 1);
    }

    std::sort(events_.begin(), events_.end(),
              [](const Event& a, const Event& b) { return std::tie(a.time, a.seq) < std::tie(b.time, b.seq); });
  }

  // ---- simulation -----------------------------------------------------------

  static std::string class_path(int c) { return "src/main/java/org/synth/C" + std::to_string(c) + ".java"; }

  std::string next_text(const std::string& stem) {
    ++uid_;
    return "    int " + stem + std::to_string(uid_) + " = " + std::to_string(uid_) + ";";
  }

  void create_class(int c, int mark) {
    auto& lines = files_[class_path(c)];
    lines.push_back({"package org.synth;", mark, LineKind::structural});
    lines.push_back({"", mark, LineKind::structural});
    lines.push_back({"public class C" + std::to_string(c) + " {", mark, LineKind::structural});
    for (int i = 0; i < kInitialBodyLines; ++i) lines.push_back({next_text("f"), mark, LineKind::plain});
    lines.push_back({"}", mark, LineKind::structural});
    created_in_[class_path(c)] = mark;
    existing_.push_back(c);
  }

  void append(const std::string& path, const std::string& stem, int mark) {
    auto& lines = files_.at(path);
    lines.insert(lines.end() - 1, Line{next_text(stem), mark, LineKind::plain});
  }

  std::vector<std::size_t> plain_lines(const std::string& path) const {
    std::vector<std::size_t> out;
    const auto& lines = files_.at(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].kind == LineKind::plain) out.push_back(i);
    }
    return out;
  }

  std::string pick_class() { return class_path(existing_[static_cast<std::size_t>(uniform(0, static_cast<int>(existing_.size()) - 1))]); }

  int begin_commit(Timestamp t) {
    SyntheticCommit c{static_cast<int>(project_.commits.size()) + 1, t, author()};
    project_.commits.push_back(c);
    return c.mark;
  }

  void emit(int mark, const std::string& message, const std::set<std::string>& paths) {
    const auto& c = project_.commits.at(static_cast<std::size_t>(mark - 1));
    const auto unix_time = std::to_string(to_unix(c.time));
    std::string& s = project_.fast_import;
    s += "commit refs/heads/main\nmark :" + std::to_string(mark) + "\n";
    s += "author " + c.author + " " + unix_time + " +0000\n";
    s += "committer " + c.author + " " + unix_time + " +0000\n";
    const std::string msg = message + "\n";
    s += "data " + std::to_string(msg.size()) + "\n" + msg;
    if (mark > 1) s += "from :" + std::to_string(mark - 1) + "\n";
    for (const auto& path : paths) {
      std::string content;
      for (const auto& line : files_.at(path)) content += line.text + "\n";
      s += "M 100644 inline " + path + "\ndata " + std::to_string(content.size()) + "\n" + content + "\n";
    }
    s += "\n";
  }

  void simulate() {
    for (const auto& e : events_) {
      switch (e.kind) {
        case EventKind::init: {
          const int mark = begin_commit(e.time);
          std::set<std::string> paths{"README.md"};
          files_["README.md"].push_back({"Synthetic project " + spec_.project, mark, LineKind::structural});
          for (int c = 0; c < e.arg; ++c) {
            create_class(c, mark);
            paths.insert(class_path(c));
          }
          emit(mark, "Initial import", paths);
          break;
        }
        case EventKind::create: {
          const int mark = begin_commit(e.time);
          create_class(e.arg, mark);
          emit(mark, "Add C" + std::to_string(e.arg), {class_path(e.arg)});
          break;
        }
        case EventKind::intro: intro(e); break;
        case EventKind::fix_part: fix_part(e); break;
        case EventKind::fix: fix(e); break;
        case EventKind::noise: {
          const int mark = begin_commit(e.time);
          std::set<std::string> paths{pick_class()};
          if (existing_.size() > 1 && chance(0.3)) paths.insert(pick_class());
          for (const auto& p : paths) append(p, "n", mark);
          emit(mark, "Tweak " + fs::path(*paths.begin()).stem().string(), paths);
          break;
        }
        case EventKind::other:
        case EventKind::unreleased: {
          const int mark = begin_commit(e.time);
          const std::string path = pick_class();
          append(path, "x", mark);
          const auto& issue = extra_.at(static_cast<std::size_t>(e.arg));
          emit(mark, issue.key + ": " + (e.kind == EventKind::other ? "improve " : "fix ") +
                         fs::path(path).stem().string(), {path});
          break;
        }
      }
    }
  }

  void intro(const Event& e) {
    auto& def = project_.defects.at(static_cast<std::size_t>(e.arg));
    const int mark = begin_commit(e.time);
    const std::string path = pick_class();
    auto& lines = files_.at(path);
    const auto plain = plain_lines(path);
    Line bug{"    int bug" + std::to_string(e.arg + 1) + " = " + std::to_string(++uid_) + ";", mark, LineKind::bug, e.arg};
    if (plain.empty()) {
      lines.insert(lines.end() - 1, bug);
    } else {
      lines[plain[static_cast<std::size_t>(uniform(0, static_cast<int>(plain.size()) - 1))]] = bug;
    }
    def.bug_path = path;
    def.intro_commit = mark;
    def.extra_u_commit = created_in_.at(path);
    emit(mark, "Rework " + fs::path(path).stem().string(), {path});
  }

  void fix_part(const Event& e) {
    auto& def = project_.defects.at(static_cast<std::size_t>(e.arg));
    const int mark = begin_commit(e.time);
    append(def.bug_path, "part", mark);
    def.fix_commits.push_back(mark);
    def.touched.insert(def.bug_path);
    emit(mark, def.key + ": partial fix in " + fs::path(def.bug_path).stem().string(), {def.bug_path});
  }

  void fix(const Event& e) {
    auto& def = project_.defects.at(static_cast<std::size_t>(e.arg));
    const FixPlan& plan = fixes_.at(static_cast<std::size_t>(e.arg));
    const int mark = begin_commit(e.time);
    std::set<std::string> paths{def.bug_path};
    auto& lines = files_.at(def.bug_path);
    std::set<int> blamed;

    if (plan.addition_only) {
      append(def.bug_path, "guard", mark);
    } else {
      auto it = std::find_if(lines.begin(), lines.end(),
                             [&](const Line& l) { return l.kind == LineKind::bug && l.defect == e.arg; });
      if (it == lines.end()) throw Error("synthetic generator lost the bug line of " + def.key);
      blamed.insert(it->owner);
      *it = Line{next_text("fixed"), mark, LineKind::plain};
      if (plan.remove_old_line) {
        std::vector<std::size_t> older;
        for (const auto i : plain_lines(def.bug_path)) {
          if (lines[i].owner != mark) older.push_back(i);
        }
        if (!older.empty()) {
          const auto victim = older[static_cast<std::size_t>(uniform(0, static_cast<int>(older.size()) - 1))];
          blamed.insert(lines[victim].owner);
          lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(victim));
        }
      }
    }
    if (plan.secondary && existing_.size() > 1) {
      std::string other = pick_class();
      for (int tries = 0; other == def.bug_path && tries < 8; ++tries) other = pick_class();
      if (other != def.bug_path) {
        append(other, "s", mark);
        paths.insert(other);
      }
    }
    if (plan.readme) {
      files_.at("README.md").push_back({"Fixed " + def.key, mark, LineKind::structural});
      paths.insert("README.md");
    }
    for (const auto& p : paths) {
      if (p.ends_with(".java")) def.touched.insert(p);
    }
    def.fix_commits.push_back(mark);
    def.szz_b_commits.assign(blamed.begin(), blamed.end());
    for (const int m : def.szz_b_commits) {
      const int v = version_of(project_.commits.at(static_cast<std::size_t>(m - 1)).time);
      if (v > 0 && (!def.szz_b_iv || v < *def.szz_b_iv)) def.szz_b_iv = v;
    }
    emit(mark, def.key + ": fix " + fs::path(def.bug_path).stem().string(), paths);
  }

  // ---- tracker documents ----------------------------------------------------

  static std::string tracker_time(Timestamp t) {
    std::string s = format_timestamp(t);
    s.pop_back();  // 'Z'
    return s + ".000+0000";
  }

  std::string issues_json() const {
    auto issue = [&](const std::string& key, const std::string& type, Timestamp created, const std::vector<int>& avs,
                     std::optional<int> fix_version) {
      nlohmann::ordered_json versions = nlohmann::ordered_json::array();
      for (const int v : avs) versions.push_back({{"name", version_name(v)}});
      nlohmann::ordered_json fix_versions = nlohmann::ordered_json::array();
      if (fix_version && *fix_version > 0) fix_versions.push_back({{"name", version_name(*fix_version)}});
      return nlohmann::ordered_json{
          {"key", key},
          {"fields",
           {{"created", tracker_time(created)},
            {"issuetype", {{"name", type}}},
            {"status", {{"name", "Closed"}}},
            {"resolution", {{"name", "Fixed"}}},
            {"versions", versions},
            {"fixVersions", fix_versions}}}};
    };
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& d : project_.defects) doc.push_back(issue(d.key, "Bug", d.created, d.tracker_avs, d.fv));
    for (const auto& x : extra_) doc.push_back(issue(x.key, x.type, x.created, {}, x.fix_version));
    return doc.dump(2) + "\n";
  }

  std::string versions_csv() const {
    csv::Writer w({"name", "release_date", "released"});
    for (int v = 1; v <= spec_.versions + 1; ++v) {
      w.add({version_name(v), format_timestamp(R(v)), v <= spec_.versions ? "true" : "false"});
    }
    return w.text();
  }

  SyntheticSpec spec_;
  std::mt19937_64 rng_;
  SyntheticProject project_;
  Timestamp init_time_;
  std::vector<Timestamp> release_;
  std::vector<Event> events_;
  std::vector<FixPlan> fixes_;
  std::vector<ExtraIssue> extra_;
  std::map<std::string, std::vector<Line>> files_;
  std::map<std::string, int> created_in_;
  std::vector<int> existing_;
  int uid_ = 0;
};

std::map<int, std::string> parse_marks(const std::string& text) {
  std::map<int, std::string> marks;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.size() < 3 || line[0] != ':') continue;
    const auto space = line.find(' ');
    marks[std::stoi(line.substr(1, space - 1))] = line.substr(space + 1);
  }
  return marks;
}

void run_git(const std::vector<std::string>& argv, std::string_view input = {}) {
  const auto r = run_process(argv, input);
  if (r.exit_code != 0) throw IoError("git failed (" + argv[1] + " " + argv[2] + "): " + r.err);
}

}  // namespace

SyntheticProject generate_synthetic(const SyntheticSpec& spec) { return Generator(spec).run(); }

std::vector<bool> expand_range(int iv, int fv) {
  std::vector<bool> out(static_cast<std::size_t>(std::max(fv, 0)), false);
  for (int v = std::max(iv, 1); v < fv; ++v) out[static_cast<std::size_t>(v - 1)] = true;
  return out;
}

MaterializedProject materialize_synthetic(const SyntheticProject& project, const fs::path& dir) {
  MaterializedProject m;
  m.dir = dir;
  m.repo = dir / "repo";
  if (fs::exists(m.repo)) throw IoError(m.repo.string() + " already exists; refusing to overwrite it");
  fs::create_directories(dir);
  write_file_atomic(dir / "issues.json", project.issues_json);
  write_file_atomic(dir / "versions.csv", project.versions_csv);
  write_file_atomic(dir / "history.fi", project.fast_import);

  const fs::path marks_file = fs::absolute(dir / "history.marks");
  run_git({"git", "init", "-q", "--initial-branch=main", m.repo.string()});
  run_git({"git", "-C", m.repo.string(), "fast-import", "--quiet", "--export-marks=" + marks_file.string()},
          project.fast_import);
  run_git({"git", "-C", m.repo.string(), "reset", "-q", "--hard", "main"});
  m.hashes = parse_marks(read_text_file(marks_file));
  auto hash = [&](int mark) -> const std::string& { return m.hashes.at(mark); };

  csv::Writer szz({"issue_key", "introducing_commit_hash", "source"});
  csv::Writer labels({"issue_key", "version_index", "affected"});
  csv::Writer defects({"issue_key", "iv", "ov", "fv", "available", "consistent", "bug_path", "intro_commit",
                       "szz_b_commits", "szz_b_iv", "touched"});
  for (const auto& d : project.defects) {
    szz.add({d.key, hash(d.intro_commit), "U"});
    if (d.extra_u_commit != d.intro_commit) szz.add({d.key, hash(d.extra_u_commit), "U"});
    szz.add({d.key, hash(d.intro_commit).substr(0, 12), "RA"});

    if (d.consistent) {
      const auto affected = expand_range(d.iv, d.fv);
      for (int v = 1; v < d.fv; ++v) {
        labels.add({d.key, std::to_string(v), affected[static_cast<std::size_t>(v - 1)] ? "1" : "0"});
      }
    }
    std::vector<std::string> blamed;
    for (const int c : d.szz_b_commits) blamed.push_back(hash(c));
    std::sort(blamed.begin(), blamed.end());
    std::string blamed_joined, touched_joined;
    for (const auto& b : blamed) blamed_joined += (blamed_joined.empty() ? "" : ";") + b;
    for (const auto& t : d.touched) touched_joined += (touched_joined.empty() ? "" : ";") + t;
    defects.add({d.key, std::to_string(d.iv), std::to_string(d.ov), std::to_string(d.fv), d.available ? "1" : "0",
                 d.consistent ? "1" : "0", d.bug_path, hash(d.intro_commit), blamed_joined,
                 d.szz_b_iv ? std::to_string(*d.szz_b_iv) : std::string(csv::kUndefined), touched_joined});
  }
  write_file_atomic(dir / "szz_import.csv", szz.text());
  write_file_atomic(dir / "oracle_labels.csv", labels.text());
  write_file_atomic(dir / "oracle_defects.csv", defects.text());

  PipelineConfig cfg;
  cfg.out = "out";
  ProjectConfig p;
  p.id = project.spec.project;
  p.issues = "issues.json";
  p.repo = "repo";
  p.versions = "versions.csv";
  p.branch = "main";
  p.szz_import = "szz_import.csv";
  cfg.projects.push_back(p);
  m.config = dir / "project.cfg";
  write_file_atomic(m.config, render_config(cfg));
  return m;
}

}  // namespace dlm
