#pragma once

#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dlm/common.hpp"
#include "dlm/csv.hpp"
#include "dlm/git.hpp"

namespace dlm::test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "dlm-test-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw IoError("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

/// Builds a linear git history with explicit timestamps through fast-import.
class HistoryBuilder {
public:
  /// Files mapped to nullopt are deleted. Returns the commit ordinal (1-based).
  int commit(const std::string& when, const std::string& message,
             const std::map<std::string, std::optional<std::string>>& files,
             const std::string& author = "Dev <dev@example.org>") {
    const int mark = ++count_;
    const long long t = to_unix(parse_timestamp(when));
    stream_ << "commit refs/heads/main\nmark :" << mark << "\n";
    stream_ << "committer " << author << " " << t << " +0000\n";
    stream_ << "data " << message.size() << "\n" << message << "\n";
    if (mark > 1) stream_ << "from :" << mark - 1 << "\n";
    for (const auto& [path, content] : files) {
      if (!content) {
        stream_ << "D " << path << "\n";
      } else {
        stream_ << "M 100644 inline " << path << "\ndata " << content->size() << "\n" << *content << "\n";
      }
    }
    stream_ << "\n";
    return mark;
  }

  /// Creates the repository at `dir` and returns commit ids by ordinal.
  std::map<int, std::string> build(const std::filesystem::path& dir) const {
    check(run_process({"git", "init", "-q", "--initial-branch=main", dir.string()}));
    const auto marks = dir.parent_path() / (dir.filename().string() + ".marks");
    check(run_process({"git", "-C", dir.string(), "fast-import", "--quiet", "--export-marks=" + marks.string()},
                      stream_.str()));
    check(run_process({"git", "-C", dir.string(), "reset", "-q", "--hard", "main"}));
    std::map<int, std::string> ids;
    std::istringstream in(read_text_file(marks));
    std::string mark, id;
    while (in >> mark >> id) ids[std::stoi(mark.substr(1))] = id;
    return ids;
  }

private:
  static void check(const ProcessResult& r) {
    if (r.exit_code != 0) throw IoError("git failed: " + r.err);
  }

  std::ostringstream stream_;
  int count_ = 0;
};

inline std::string lines(std::initializer_list<std::string> ls) {
  std::string s;
  for (const auto& l : ls) s += l + "\n";
  return s;
}

}  // namespace dlm::test
