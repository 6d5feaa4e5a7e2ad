#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dlm {

struct ProcessResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

/// Spawns argv[0] (PATH lookup) with the given stdin contents and collects
/// stdout/stderr. Never goes through a shell.
ProcessResult run_process(const std::vector<std::string>& argv, std::string_view input = {});

struct TreeEntry {
  std::string path;
  std::string blob;
};

/// Read-only handle on a local clone, driven through the git CLI.
class GitRepository {
public:
  /// Opens `path` and resolves `branch` (empty = the repository's HEAD branch).
  /// Throws IoError if the path is not a readable git repository.
  explicit GitRepository(std::filesystem::path path, std::string branch = {});

  const std::filesystem::path& path() const { return path_; }
  const std::string& branch() const { return branch_; }

  /// Runs `git -C <repo> <args...>`; throws IoError on a nonzero exit.
  std::string git(const std::vector<std::string>& args, std::string_view input = {}) const;

  /// All blobs in the tree of `rev`, sorted by path.
  std::vector<TreeEntry> ls_tree(const std::string& rev) const;

  /// Contents of the given blob ids (one `cat-file --batch` round trip).
  std::map<std::string, std::string> read_blobs(const std::vector<std::string>& blob_ids) const;

private:
  std::filesystem::path path_;
  std::string branch_;
};

}  // namespace dlm
