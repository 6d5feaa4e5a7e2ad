#include "dlm/ingest.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <charconv>

#include "dlm/git.hpp"

namespace dlm {

using nlohmann::json;

namespace {

std::string nested_name(const json& fields, const char* field) {
  if (!fields.contains(field)) return {};
  const json& node = fields.at(field);
  if (node.is_object() && node.contains("name") && node.at("name").is_string()) {
    return node.at("name").get<std::string>();
  }
  if (node.is_string()) return node.get<std::string>();
  return {};
}

std::vector<std::string> name_list(const json& fields, const char* field) {
  std::vector<std::string> names;
  if (!fields.contains(field) || !fields.at(field).is_array()) return names;
  for (const json& v : fields.at(field)) {
    if (v.is_object() && v.contains("name") && v.at("name").is_string()) {
      names.push_back(v.at("name").get<std::string>());
    } else if (v.is_string()) {
      names.push_back(v.get<std::string>());
    }
  }
  return names;
}

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

IssueExport parse_issue_export(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("issue export is not valid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("issues")) {
    doc = doc.at("issues");
  }
  if (!doc.is_array()) {
    throw ParseError("issue export must be a JSON array of issues");
  }

  IssueExport result;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& item = doc[i];
    if (!item.is_object()) {
      throw ParseError("issue export element " + std::to_string(i) + " is not an object");
    }
    const json empty = json::object();
    const json& fields = item.contains("fields") && item.at("fields").is_object() ? item.at("fields") : empty;

    std::string key;
    if (item.contains("key") && item.at("key").is_string()) key = item.at("key").get<std::string>();
    if (key.empty()) {
      result.skipped.push_back({i, {}, "missing key"});
      continue;
    }
    if (!fields.contains("created") || !fields.at("created").is_string()) {
      result.skipped.push_back({i, key, "missing created"});
      continue;
    }
    IssueRecord rec;
    rec.key = key;
    try {
      rec.created = parse_timestamp(fields.at("created").get<std::string>());
    } catch (const ParseError& e) {
      result.skipped.push_back({i, key, std::string("bad created: ") + e.what()});
      continue;
    }
    rec.issue_type = nested_name(fields, "issuetype");
    rec.status = nested_name(fields, "status");
    rec.resolution = nested_name(fields, "resolution");
    rec.affected_version_names = name_list(fields, "versions");
    rec.fix_version_names = name_list(fields, "fixVersions");
    result.issues.push_back(std::move(rec));
  }

  // Keys must be unique within a project; later duplicates are reported.
  std::set<std::string> seen;
  std::vector<IssueRecord> unique;
  unique.reserve(result.issues.size());
  for (std::size_t i = 0; i < result.issues.size(); ++i) {
    if (seen.insert(result.issues[i].key).second) {
      unique.push_back(std::move(result.issues[i]));
    } else {
      result.skipped.push_back({i, result.issues[i].key, "duplicate key"});
    }
  }
  result.issues = std::move(unique);
  return result;
}

std::vector<IssueRecord> filter_fixed_defects(std::span<const IssueRecord> issues) {
  std::vector<IssueRecord> kept;
  for (const auto& issue : issues) {
    const auto type = to_lower(issue.issue_type);
    const auto status = to_lower(issue.status);
    if ((type == "bug" || type == "defect") && (status == "closed" || status == "resolved") &&
        to_lower(issue.resolution) == "fixed") {
      kept.push_back(issue);
    }
  }
  return kept;
}

std::vector<std::string> CommitRecord::touched_paths() const {
  std::vector<std::string> paths;
  paths.reserve(changes.size());
  for (const auto& c : changes) paths.push_back(c.path);
  return paths;
}

namespace {

constexpr char kRecordStart = '\x01';
constexpr char kFieldSep = '\x02';
constexpr char kHeaderEnd = '\x03';

// "diff --git a/P b/P": with --no-renames both sides name the same path.
std::string path_from_diff_header(std::string_view line) {
  std::string_view rest = line.substr(std::string_view("diff --git ").size());
  if (rest.size() >= 5 && rest.front() == 'a' && rest[1] == '/') {
    const std::size_t len = (rest.size() - 5) / 2;
    return std::string(rest.substr(2, len));
  }
  return std::string(rest);
}

int hunk_old_start(std::string_view line) {
  // @@ -a[,b] +c[,d] @@
  const auto minus = line.find('-');
  if (minus == std::string_view::npos) throw ParseError("bad hunk header: " + std::string(line));
  int start = 0;
  const char* first = line.data() + minus + 1;
  auto [ptr, ec] = std::from_chars(first, line.data() + line.size(), start);
  if (ec != std::errc()) throw ParseError("bad hunk header: " + std::string(line));
  // A zero-length old range "-a,0" means lines are inserted after line a.
  return start;
}

void parse_patch(std::string_view patch, CommitRecord& commit) {
  FileChange* current = nullptr;
  int old_line = 0;
  bool in_hunk = false;
  std::size_t pos = 0;
  while (pos < patch.size()) {
    auto nl = patch.find('\n', pos);
    if (nl == std::string_view::npos) nl = patch.size();
    const std::string_view line = patch.substr(pos, nl - pos);
    pos = nl + 1;

    if (line.starts_with("diff --git ")) {
      commit.changes.push_back({path_from_diff_header(line), {}, 0, false});
      current = &commit.changes.back();
      in_hunk = false;
      continue;
    }
    if (!current) continue;
    if (line.starts_with("@@ ")) {
      old_line = hunk_old_start(line);
      in_hunk = true;
      continue;
    }
    if (!in_hunk) {
      if (line.starts_with("Binary files ") || line.starts_with("GIT binary patch")) {
        current->binary = true;
      }
      continue;
    }
    if (line.empty()) continue;
    switch (line.front()) {
      case '-':
        current->removed.push_back({old_line, std::string(line.substr(1))});
        ++old_line;
        break;
      case '+':
        ++current->added;
        break;
      case ' ':
        ++old_line;
        break;
      default:  // "\ No newline at end of file"
        break;
    }
  }
  std::sort(commit.changes.begin(), commit.changes.end(),
            [](const FileChange& a, const FileChange& b) { return a.path < b.path; });
}

}  // namespace

std::vector<std::string> git_log_arguments(const std::string& branch) {
  return {"log",
          branch,
          "--topo-order",
          "--reverse",
          "--no-color",
          "--no-renames",
          "--no-ext-diff",
          "--diff-merges=off",
          "-p",
          "-U0",
          "--format=%x01%H%x02%P%x02%ct%x02%an <%ae>%x02%B%x03"};
}

std::vector<CommitRecord> parse_git_log(std::string_view output) {
  std::vector<CommitRecord> commits;
  std::size_t pos = output.find(kRecordStart);
  while (pos != std::string_view::npos) {
    const std::size_t next = output.find(kRecordStart, pos + 1);
    const std::string_view record =
        output.substr(pos + 1, (next == std::string_view::npos ? output.size() : next) - pos - 1);
    pos = next;

    const auto header_end = record.find(kHeaderEnd);
    if (header_end == std::string_view::npos) throw ParseError("truncated git log record");
    const std::string_view header = record.substr(0, header_end);

    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (int i = 0; i < 4; ++i) {
      const auto sep = header.find(kFieldSep, start);
      if (sep == std::string_view::npos) throw ParseError("malformed git log header");
      parts.push_back(header.substr(start, sep - start));
      start = sep + 1;
    }
    CommitRecord commit;
    commit.id = std::string(parts[0]);
    for (std::size_t b = 0; b < parts[1].size();) {
      auto e = parts[1].find(' ', b);
      if (e == std::string_view::npos) e = parts[1].size();
      if (e > b) commit.parents.emplace_back(parts[1].substr(b, e - b));
      b = e + 1;
    }
    long long secs = 0;
    std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), secs);
    commit.timestamp = from_unix(secs);
    commit.author = std::string(parts[3]);
    commit.message = trim(header.substr(start));

    if (!commit.is_merge()) {
      parse_patch(record.substr(header_end + 1), commit);
    }
    commits.push_back(std::move(commit));
  }
  return commits;
}

std::vector<CommitRecord> extract_commits(const GitRepository& repo) {
  auto commits = parse_git_log(repo.git(git_log_arguments(repo.branch())));
  spdlog::debug("extracted {} commits from {}", commits.size(), repo.path().string());
  return commits;
}

CommitIndex::CommitIndex(std::span<const CommitRecord> commits) : commits_(commits) {
  for (std::size_t i = 0; i < commits.size(); ++i) by_id_.emplace(commits[i].id, i);
}

const CommitRecord* CommitIndex::find(std::string_view id) const {
  if (id.size() < 4) return nullptr;
  auto it = by_id_.lower_bound(id);
  if (it == by_id_.end() || !std::string_view(it->first).starts_with(id)) return nullptr;
  if (it->first.size() == id.size()) return &commits_[it->second];
  auto second = std::next(it);
  if (second != by_id_.end() && std::string_view(second->first).starts_with(id)) return nullptr;  // ambiguous
  return &commits_[it->second];
}

const CommitRecord& CommitIndex::at(std::string_view id) const {
  if (const auto* c = find(id)) return *c;
  throw Error("unknown commit " + std::string(id));
}

std::size_t CommitIndex::position(std::string_view id) const {
  const auto* c = find(id);
  if (!c) throw Error("unknown commit " + std::string(id));
  return static_cast<std::size_t>(c - commits_.data());
}

bool mentions_key(std::string_view message, std::string_view key) {
  if (key.empty()) return false;
  std::size_t pos = message.find(key);
  while (pos != std::string_view::npos) {
    const bool left_ok = pos == 0 || !is_alnum(message[pos - 1]);
    const std::size_t end = pos + key.size();
    const bool right_ok = end == message.size() || !is_alnum(message[end]);
    if (left_ok && right_ok) return true;
    pos = message.find(key, pos + 1);
  }
  return false;
}

std::vector<IssueCommitLink> link_commits_to_issues(std::span<const CommitRecord> commits,
                                                    const std::set<std::string>& keys) {
  std::map<std::string, std::vector<const CommitRecord*>, std::less<>> hits;
  std::set<std::size_t> lengths;
  for (const auto& k : keys) {
    if (!k.empty()) lengths.insert(k.size());
  }
  for (const auto& commit : commits) {
    const std::string_view msg = commit.message;
    std::set<std::string_view> matched;
    for (std::size_t i = 0; i < msg.size(); ++i) {
      if (i > 0 && is_alnum(msg[i - 1])) continue;
      for (const std::size_t len : lengths) {
        if (i + len > msg.size()) break;
        if (i + len < msg.size() && is_alnum(msg[i + len])) continue;
        const auto candidate = msg.substr(i, len);
        if (auto it = keys.find(std::string(candidate)); it != keys.end()) matched.insert(*it);
      }
    }
    for (const auto key : matched) hits[std::string(key)].push_back(&commit);
  }

  std::vector<IssueCommitLink> links;
  links.reserve(keys.size());
  for (const auto& key : keys) {
    IssueCommitLink link{key, {}};
    if (auto it = hits.find(key); it != hits.end()) {
      auto& linked = it->second;
      std::sort(linked.begin(), linked.end(), [](const CommitRecord* a, const CommitRecord* b) {
        return std::tie(a->timestamp, a->id) < std::tie(b->timestamp, b->id);
      });
      for (const auto* c : linked) link.commit_ids.push_back(c->id);
    }
    links.push_back(std::move(link));
  }
  return links;
}

const std::string& resolve_fix_commit(const IssueCommitLink& link) {
  if (link.commit_ids.empty()) {
    throw Excluded(link.issue_key, "unlinked defect");
  }
  return link.commit_ids.back();
}

}  // namespace dlm
