#include "dlm/config.hpp"

#include <cctype>
#include <charconv>
#include <set>

#include "dlm/csv.hpp"

namespace dlm {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    auto comma = value.find(',', pos);
    if (comma == std::string_view::npos) comma = value.size();
    auto item = trim(value.substr(pos, comma - pos));
    if (!item.empty()) out.push_back(std::move(item));
    pos = comma + 1;
  }
  return out;
}

template <typename T>
T parse_number(const std::string& value, std::size_t line) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ParseError("config line " + std::to_string(line) + ": '" + value + "' is not a number");
  }
  return out;
}

fs::path resolve(const fs::path& base, const std::string& value) {
  const fs::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

PipelineConfig parse_config(std::string_view text, const fs::path& base_dir) {
  PipelineConfig config;
  ProjectConfig* project = nullptr;
  std::set<std::string> ids;
  std::set<std::string> seen_keys;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    auto fail = [&](const std::string& msg) {
      return ParseError("config line " + std::to_string(line_no) + ": " + msg);
    };
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw fail("unterminated section header");
      const std::string inner = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!inner.starts_with("project") || inner.size() < 9 || !std::isspace(static_cast<unsigned char>(inner[7]))) {
        throw fail("expected [project ID], got [" + inner + "]");
      }
      const std::string id = trim(std::string_view(inner).substr(8));
      if (id.empty()) throw fail("project id is empty");
      if (!ids.insert(id).second) throw fail("duplicate project '" + id + "'");
      config.projects.push_back(ProjectConfig{});
      project = &config.projects.back();
      project->id = id;
      seen_keys.clear();
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw fail("expected key = value");
    const std::string key = to_lower(trim(std::string_view(line).substr(0, eq)));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!seen_keys.insert(key).second) throw fail("duplicate key '" + key + "'");

    if (!project) {
      if (key == "out") config.out = resolve(base_dir, value);
      else if (key == "coldstart_p") config.coldstart_p = parse_number<double>(value, line_no);
      else if (key == "alpha") config.alpha = parse_number<double>(value, line_no);
      else if (key == "min_usable_defects") config.thresholds.min_usable_defects = parse_number<std::size_t>(value, line_no);
      else if (key == "min_versions") config.thresholds.min_versions = parse_number<std::size_t>(value, line_no);
      else if (key == "min_pct_consistent") config.thresholds.min_pct_consistent = parse_number<double>(value, line_no);
      else throw fail("unknown global key '" + key + "'");
      continue;
    }

    if (key == "issues") project->issues = resolve(base_dir, value);
    else if (key == "repo") project->repo = resolve(base_dir, value);
    else if (key == "versions") project->versions = resolve(base_dir, value);
    else if (key == "branch") project->branch = value;
    else if (key == "exclude") project->exclude = split_list(value);
    else if (key == "extensions") project->extensions = split_list(value);
    else if (key == "szz_import") project->szz_import = resolve(base_dir, value);
    else if (key == "catalog") project->catalog = resolve(base_dir, value);
    else if (key == "methods") {
      project->methods.clear();
      const auto names = split_list(value);
      if (names.size() == 1 && to_lower(names.front()) == "all") {
        project->methods.assign(std::begin(kAllMethods), std::end(kAllMethods));
      } else {
        try {
          for (const auto& n : names) project->methods.push_back(parse_method(n));
        } catch (const Error& e) {
          throw fail(e.what());
        }
        if (project->methods.empty()) throw fail("methods list is empty");
      }
    } else {
      throw fail("unknown project key '" + key + "'");
    }
  }

  if (config.projects.empty()) throw ParseError("config defines no [project ...] section");
  for (const auto& p : config.projects) {
    for (const auto& [name, path] : {std::pair{"issues", &p.issues}, {"repo", &p.repo}, {"versions", &p.versions}}) {
      if (path->empty()) throw ParseError("project " + p.id + ": missing required key '" + name + "'");
    }
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw ParseError("alpha must lie in (0, 1)");
  return config;
}

PipelineConfig load_config(const fs::path& path) {
  return parse_config(read_text_file(path), path.parent_path());
}

std::string render_config(const PipelineConfig& config) {
  std::string out;
  auto put = [&](std::string_view key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  auto join = [](const std::vector<std::string>& items) {
    std::string s;
    for (const auto& i : items) s += (s.empty() ? "" : ", ") + i;
    return s;
  };
  put("out", config.out.generic_string());
  put("coldstart_p", csv::number(config.coldstart_p));
  put("alpha", csv::number(config.alpha));
  put("min_usable_defects", std::to_string(config.thresholds.min_usable_defects));
  put("min_versions", std::to_string(config.thresholds.min_versions));
  put("min_pct_consistent", csv::number(config.thresholds.min_pct_consistent));
  for (const auto& p : config.projects) {
    out += "\n[project " + p.id + "]\n";
    put("issues", p.issues.generic_string());
    put("repo", p.repo.generic_string());
    put("versions", p.versions.generic_string());
    if (!p.branch.empty()) put("branch", p.branch);
    if (!p.exclude.empty()) put("exclude", join(p.exclude));
    put("extensions", join(p.extensions));
    std::vector<std::string> methods;
    for (const Method m : p.methods) methods.emplace_back(method_name(m));
    put("methods", join(methods));
    if (p.szz_import) put("szz_import", p.szz_import->generic_string());
    if (p.catalog) put("catalog", p.catalog->generic_string());
  }
  return out;
}

void check_inputs(const PipelineConfig& config) {
  std::string missing;
  for (const auto& p : config.projects) {
    std::vector<const fs::path*> paths{&p.issues, &p.repo, &p.versions};
    if (p.szz_import) paths.push_back(&*p.szz_import);
    if (p.catalog) paths.push_back(&*p.catalog);
    for (const auto* path : paths) {
      if (!fs::exists(*path)) missing += "\n  " + p.id + ": " + path->string();
    }
  }
  if (!missing.empty()) throw IoError("missing inputs:" + missing);
}

}  // namespace dlm
