#include "dlm/git.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <mutex>

#include "dlm/common.hpp"

extern char** environ;

namespace dlm {

namespace {

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] {
    struct sigaction sa {};
    sa.sa_handler = SIG_IGN;
    sigaction(SIGPIPE, &sa, nullptr);
  });
}

struct Pipe {
  int fd[2] = {-1, -1};
  Pipe() {
    if (pipe2(fd, O_CLOEXEC) != 0) throw IoError(std::string("pipe: ") + std::strerror(errno));
  }
  ~Pipe() { close_all(); }
  void close_end(int i) {
    if (fd[i] >= 0) {
      ::close(fd[i]);
      fd[i] = -1;
    }
  }
  void close_all() {
    close_end(0);
    close_end(1);
  }
};

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, std::string_view input) {
  ignore_sigpipe();
  Pipe in, out, err;

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in.fd[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out.fd[1], STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err.fd[1], STDERR_FILENO);

  std::vector<char*> args;
  args.reserve(argv.size() + 1);
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw IoError("cannot start " + argv[0] + ": " + std::strerror(rc));
  }
  in.close_end(0);
  out.close_end(1);
  err.close_end(1);

  ProcessResult result;
  std::size_t written = 0;
  if (input.empty()) in.close_end(1);
  else fcntl(in.fd[1], F_SETFL, O_NONBLOCK);

  char buf[65536];
  while (out.fd[0] >= 0 || err.fd[0] >= 0) {
    pollfd fds[3];
    int n = 0;
    int out_slot = -1, err_slot = -1, in_slot = -1;
    if (out.fd[0] >= 0) { fds[n] = {out.fd[0], POLLIN, 0}; out_slot = n++; }
    if (err.fd[0] >= 0) { fds[n] = {err.fd[0], POLLIN, 0}; err_slot = n++; }
    if (in.fd[1] >= 0) { fds[n] = {in.fd[1], POLLOUT, 0}; in_slot = n++; }
    if (::poll(fds, static_cast<nfds_t>(n), -1) < 0) {
      if (errno == EINTR) continue;
      throw IoError(std::string("poll: ") + std::strerror(errno));
    }
    auto drain = [&](int slot, Pipe& p, std::string& sink) {
      if (slot < 0 || !(fds[slot].revents & (POLLIN | POLLHUP | POLLERR))) return;
      const ssize_t got = ::read(p.fd[0], buf, sizeof buf);
      if (got > 0) sink.append(buf, static_cast<std::size_t>(got));
      else if (got == 0 || errno != EINTR) p.close_end(0);
    };
    drain(out_slot, out, result.out);
    drain(err_slot, err, result.err);
    if (in_slot >= 0 && (fds[in_slot].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t put = ::write(in.fd[1], input.data() + written, input.size() - written);
      if (put > 0) written += static_cast<std::size_t>(put);
      if (put < 0 && errno != EAGAIN && errno != EINTR) in.close_end(1);
      if (written == input.size()) in.close_end(1);
    }
  }
  in.close_end(1);

  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw IoError(std::string("waitpid: ") + std::strerror(errno));
  }
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return result;
}

GitRepository::GitRepository(std::filesystem::path path, std::string branch)
    : path_(std::move(path)), branch_(std::move(branch)) {
  if (!std::filesystem::exists(path_)) {
    throw IoError("repository not found: " + path_.string());
  }
  const auto probe = run_process({"git", "-C", path_.string(), "rev-parse", "--git-dir"});
  if (probe.exit_code != 0) {
    throw IoError("not a readable git repository: " + path_.string() + ": " + probe.err);
  }
  if (branch_.empty()) {
    const auto head = run_process({"git", "-C", path_.string(), "symbolic-ref", "--short", "HEAD"});
    branch_ = head.exit_code == 0 ? trim(head.out) : "HEAD";
  }
  const auto check =
      run_process({"git", "-C", path_.string(), "rev-parse", "--verify", "--quiet", branch_ + "^{commit}"});
  if (check.exit_code != 0) {
    throw IoError("branch '" + branch_ + "' has no commits in " + path_.string());
  }
}

std::string GitRepository::git(const std::vector<std::string>& args, std::string_view input) const {
  std::vector<std::string> argv{"git", "-C", path_.string(), "-c", "core.quotepath=off"};
  argv.insert(argv.end(), args.begin(), args.end());
  auto result = run_process(argv, input);
  if (result.exit_code != 0) {
    std::string cmd;
    for (const auto& a : args) cmd += " " + a;
    throw IoError("git" + cmd + " failed (" + std::to_string(result.exit_code) + "): " + trim(result.err));
  }
  return std::move(result.out);
}

std::vector<TreeEntry> GitRepository::ls_tree(const std::string& rev) const {
  const std::string out = git({"ls-tree", "-r", "-z", "--full-tree", rev});
  std::vector<TreeEntry> entries;
  std::size_t pos = 0;
  while (pos < out.size()) {
    const auto end = out.find('\0', pos);
    const std::string_view record(out.data() + pos, (end == std::string::npos ? out.size() : end) - pos);
    pos = end == std::string::npos ? out.size() : end + 1;
    // <mode> SP <type> SP <object> TAB <path>
    const auto tab = record.find('\t');
    if (tab == std::string_view::npos) continue;
    const std::string_view meta = record.substr(0, tab);
    const auto sp1 = meta.find(' ');
    const auto sp2 = meta.find(' ', sp1 + 1);
    if (meta.substr(sp1 + 1, sp2 - sp1 - 1) != "blob") continue;
    entries.push_back({std::string(record.substr(tab + 1)), std::string(meta.substr(sp2 + 1))});
  }
  std::sort(entries.begin(), entries.end(),
            [](const TreeEntry& a, const TreeEntry& b) { return a.path < b.path; });
  return entries;
}

std::map<std::string, std::string> GitRepository::read_blobs(const std::vector<std::string>& blob_ids) const {
  std::map<std::string, std::string> blobs;
  if (blob_ids.empty()) return blobs;
  std::string request;
  for (const auto& id : blob_ids) request += id + "\n";
  const std::string out = git({"cat-file", "--batch"}, request);
  std::size_t pos = 0;
  while (pos < out.size()) {
    const auto nl = out.find('\n', pos);
    if (nl == std::string::npos) break;
    const std::string header = out.substr(pos, nl - pos);
    pos = nl + 1;
    // <oid> SP <type> SP <size>   or   <oid> SP missing
    const auto sp1 = header.find(' ');
    const auto sp2 = header.find(' ', sp1 + 1);
    if (sp2 == std::string::npos) continue;
    const std::size_t size = std::stoul(header.substr(sp2 + 1));
    blobs.emplace(header.substr(0, sp1), out.substr(pos, size));
    pos += size + 1;
  }
  return blobs;
}

}  // namespace dlm
