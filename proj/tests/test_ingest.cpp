#include <doctest.h>

#include "dlm/git.hpp"
#include "dlm/ingest.hpp"
#include "support.hpp"

using namespace dlm;

namespace {

std::string record(const std::string& id, const std::string& parents, long long t, const std::string& msg,
                   const std::string& patch) {
  return "\x01" + id + "\x02" + parents + "\x02" + std::to_string(t) + "\x02" + "A <a@x>" + "\x02" + msg + "\x03" +
         patch;
}

CommitRecord commit(std::string id, long long t, std::string msg) {
  CommitRecord c;
  c.id = std::move(id);
  c.timestamp = from_unix(t);
  c.message = std::move(msg);
  return c;
}

}  // namespace

TEST_CASE("issue export keeps versions and reports skipped records") {
  const auto doc = R"([
    {"key": "QPID-4462", "fields": {"created": "2013-01-10T10:00:00.000+0000",
      "issuetype": {"name": "Bug"}, "status": {"name": "Closed"}, "resolution": {"name": "Fixed"},
      "versions": [{"name": "0.18"}, {"name": "0.20"}], "fixVersions": [{"name": "0.22"}]}},
    {"fields": {"created": "2013-01-10"}},
    {"key": "QPID-2", "fields": {}},
    {"key": "QPID-3", "fields": {"created": "yesterday"}},
    {"key": "QPID-4462", "fields": {"created": "2013-01-11"}}
  ])";
  const auto e = parse_issue_export(doc);
  REQUIRE(e.issues.size() == 1);
  CHECK(e.issues[0].key == "QPID-4462");
  CHECK(e.issues[0].affected_version_names == std::vector<std::string>{"0.18", "0.20"});
  CHECK(e.issues[0].fix_version_names == std::vector<std::string>{"0.22"});
  CHECK(format_timestamp(e.issues[0].created) == "2013-01-10T10:00:00Z");
  REQUIRE(e.skipped.size() == 4);
  CHECK(e.skipped[0].reason == "missing key");
  CHECK(e.skipped[1].reason == "missing created");
  CHECK(e.skipped[2].key == "QPID-3");
  CHECK(e.skipped[3].reason == "duplicate key");
}

TEST_CASE("issue export accepts a wrapping object and rejects malformed documents") {
  CHECK(parse_issue_export(R"({"issues": []})").issues.empty());
  CHECK_THROWS_AS(parse_issue_export("{not json"), ParseError);
  CHECK_THROWS_AS(parse_issue_export(R"({"key": "A-1"})"), ParseError);
  CHECK_THROWS_WITH_AS(parse_issue_export(R"([{"key": "A-1", "fields": {"created": "2013-01-01"}}, 7])"),
                       doctest::Contains("element 1"), ParseError);
}

TEST_CASE("fixed-defect filter compares case-insensitively") {
  IssueRecord bug{"A-1", from_unix(0), "BUG", "resolved", "FIXED", {}, {}};
  IssueRecord wontfix{"A-2", from_unix(0), "Bug", "Closed", "Won't Fix", {}, {}};
  IssueRecord feature{"A-3", from_unix(0), "Improvement", "Closed", "Fixed", {}, {}};
  IssueRecord open{"A-4", from_unix(0), "Defect", "Open", "Fixed", {}, {}};
  const std::vector<IssueRecord> all{bug, wontfix, feature, open};
  const auto kept = filter_fixed_defects(all);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].key == "A-1");
}

TEST_CASE("git log parser reads headers, removed lines and binary files") {
  const std::string log =
      record("aaaa1111", "", 1000, "init\n", "\n") +
      record("bbbb2222", "aaaa1111", 2000, "[QPID-4462] fix path\n\nbody\n",
             "\ndiff --git a/src/B.java b/src/B.java\nindex 1..2 100644\n--- a/src/B.java\n+++ b/src/B.java\n"
             "@@ -3,2 +3 @@ class B\n-  int x;\n-\n+  long x;\n@@ -10,0 +10,2 @@\n+a\n+b\n"
             "\\ No newline at end of file\n"
             "diff --git a/src/A.java b/src/A.java\n--- a/src/A.java\n+++ b/src/A.java\n@@ -1 +1 @@\n-old\n+new\n"
             "diff --git a/img.png b/img.png\nBinary files a/img.png and b/img.png differ\n") +
      record("cccc3333", "bbbb2222 dddd4444", 3000, "Merge\n", "");
  const auto commits = parse_git_log(log);
  REQUIRE(commits.size() == 3);
  CHECK(commits[0].parents.empty());
  CHECK(commits[1].message == "[QPID-4462] fix path\n\nbody");
  CHECK(to_unix(commits[1].timestamp) == 2000);
  CHECK(commits[1].author == "A <a@x>");
  REQUIRE(commits[1].changes.size() == 3);
  CHECK(commits[1].touched_paths() == std::vector<std::string>{"img.png", "src/A.java", "src/B.java"});
  CHECK(commits[1].changes[0].binary);
  const auto& b = commits[1].changes[2];
  REQUIRE(b.removed.size() == 2);
  CHECK(b.removed[0].line == 3);
  CHECK(b.removed[0].text == "  int x;");
  CHECK(b.removed[1].line == 4);
  CHECK(b.removed[1].text.empty());
  CHECK(b.added == 3);
  CHECK(b.deleted() == 2);
  CHECK(commits[2].is_merge());
  CHECK(commits[2].changes.empty());
  CHECK_THROWS_AS(parse_git_log("\x01" "abc"), ParseError);
}

TEST_CASE("key mentions respect alphanumeric boundaries") {
  CHECK(mentions_key("[QPID-4462] fix path", "QPID-4462"));
  CHECK_FALSE(mentions_key("QPID-44621 refactor", "QPID-4462"));
  CHECK_FALSE(mentions_key("XQPID-4462", "QPID-4462"));
  CHECK(mentions_key("QPID-4462", "QPID-4462"));
  CHECK(mentions_key("see QPID-44 and QPID-4462.", "QPID-4462"));
  CHECK_FALSE(mentions_key("qpid-4462", "QPID-4462"));
  CHECK_FALSE(mentions_key("anything", ""));
}

TEST_CASE("links are sorted by key and commits by time") {
  const std::vector<CommitRecord> commits{commit("c3", 300, "QPID-1 later"), commit("c1", 100, "QPID-1 first"),
                                          commit("c2", 200, "QPID-10 only"), commit("c4", 400, "QPID-1, QPID-2")};
  const auto links = link_commits_to_issues(commits, {"QPID-2", "QPID-1", "QPID-10", "QPID-9"});
  REQUIRE(links.size() == 4);
  CHECK(links[0].issue_key == "QPID-1");
  CHECK(links[0].commit_ids == std::vector<std::string>{"c1", "c3", "c4"});
  CHECK(links[1].commit_ids == std::vector<std::string>{"c2"});
  CHECK(links[2].commit_ids == std::vector<std::string>{"c4"});
  CHECK(links[3].commit_ids.empty());
  CHECK(resolve_fix_commit(links[0]) == "c4");
  CHECK_THROWS_AS(resolve_fix_commit(links[3]), Excluded);
}

TEST_CASE("fix commit is the latest linked commit") {
  const std::vector<CommitRecord> commits{commit("f1", to_unix(parse_timestamp("2013-02-01T00:00:00Z")), "QPID-4462"),
                                          commit("f2", to_unix(parse_timestamp("2013-03-31T21:51:49+00:00")),
                                                 "[QPID-4462] last")};
  const auto links = link_commits_to_issues(commits, {"QPID-4462"});
  CHECK(resolve_fix_commit(links[0]) == "f2");
}

TEST_CASE("commit index resolves unique prefixes") {
  const std::vector<CommitRecord> commits{commit("abcdef01", 1, ""), commit("abcdff02", 2, ""),
                                          commit("123456aa", 3, "")};
  const CommitIndex index(commits);
  CHECK(index.find("abcdef01") == &commits[0]);
  CHECK(index.find("abcde") == &commits[0]);
  CHECK(index.find("abcd") == nullptr);  // ambiguous
  CHECK(index.find("123") == nullptr);   // too short
  CHECK(index.find("1234") == &commits[2]);
  CHECK(index.find("ffff") == nullptr);
  CHECK(index.position("abcdff") == 1);
  CHECK_THROWS_AS(index.at("9999"), Error);
}

TEST_CASE("timestamps normalize offsets to UTC") {
  CHECK(format_timestamp(parse_timestamp("2013-03-31T21:51:49+00:00")) == "2013-03-31T21:51:49Z");
  CHECK(format_timestamp(parse_timestamp("2012-11-21T13:45:12.000+0200")) == "2012-11-21T11:45:12Z");
  CHECK(format_timestamp(parse_timestamp("2013-03-31")) == "2013-03-31T00:00:00Z");
  CHECK_THROWS_AS(parse_timestamp("31/03/2013"), ParseError);
}

TEST_CASE("commits extracted from a repository") {
  test::TempDir tmp;
  test::HistoryBuilder h;
  h.commit("2013-01-01T00:00:00Z", "init", {{"src/A.java", test::lines({"a", "b", "c"})}});
  h.commit("2013-02-01T00:00:00Z", "QPID-1 change", {{"src/A.java", test::lines({"a", "B", "c", "d"})}});
  h.commit("2013-03-01T00:00:00Z", "drop", {{"src/A.java", std::nullopt}, {"README", "x\n"}});
  const auto ids = h.build(tmp / "repo");
  const GitRepository repo(tmp / "repo");
  CHECK(repo.branch() == "main");
  const auto commits = extract_commits(repo);
  REQUIRE(commits.size() == 3);
  CHECK(commits[0].id == ids.at(1));
  CHECK(commits[1].parents == std::vector<std::string>{ids.at(1)});
  REQUIRE(commits[1].changes.size() == 1);
  CHECK(commits[1].changes[0].removed.size() == 1);
  CHECK(commits[1].changes[0].removed[0].line == 2);
  CHECK(commits[1].changes[0].added == 2);
  CHECK(commits[2].touched_paths() == std::vector<std::string>{"README", "src/A.java"});
  CHECK(commits[2].changes[1].deleted() == 4);
  CHECK(format_timestamp(commits[1].timestamp) == "2013-02-01T00:00:00Z");
  CHECK_THROWS_AS(GitRepository(tmp / "missing"), IoError);
}
