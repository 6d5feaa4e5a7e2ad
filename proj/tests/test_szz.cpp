#include <doctest.h>

#include "dlm/git.hpp"
#include "dlm/ingest.hpp"
#include "dlm/lifecycle.hpp"
#include "dlm/szz.hpp"
#include "fixtures.hpp"
#include "support.hpp"

using namespace dlm;

namespace {

const std::string kA = "1111111111111111111111111111111111111111";
const std::string kB = "2222222222222222222222222222222222222222";

std::vector<CommitRecord> numbered(int n) {
  std::vector<CommitRecord> cs;
  for (int i = 0; i < n; ++i) {
    CommitRecord c;
    c.id = std::string(40, static_cast<char>('a' + i));
    c.timestamp = from_unix(1000 * (i + 1));
    cs.push_back(c);
  }
  return cs;
}

}  // namespace

TEST_CASE("blame porcelain maps final lines to commits") {
  const std::string out = kA + " 1 1 2\nauthor X\nfilename A.java\n\tline one\n" + kA + " 2 2\n\tline two\n" + kB +
                          " 5 3 1\nauthor Y\nsummary s\nfilename A.java\n\tline three\n";
  const auto owners = parse_blame_porcelain(out);
  REQUIRE(owners.size() == 3);
  CHECK(owners[0] == kA);
  CHECK(owners[1] == kA);
  CHECK(owners[2] == kB);
  CHECK(parse_blame_porcelain("").empty());
}

TEST_CASE("removed lines drop blank deletions and root commits") {
  CommitRecord fix;
  fix.id = "f";
  fix.parents = {"p"};
  fix.changes = {{"A.java", {{3, "  x = 1;"}, {4, ""}, {5, " \t "}}, 0, false}, {"B.java", {{1, "   "}}, 1, false}};
  const auto r = removed_lines(fix);
  REQUIRE(r.size() == 1);
  CHECK(r[0].path == "A.java");
  REQUIRE(r[0].lines.size() == 1);
  CHECK(r[0].lines[0].line == 3);
  fix.parents.clear();
  CHECK(removed_lines(fix).empty());
}

TEST_CASE("discard_after and szz_iv") {
  const auto t = test::qpid_timeline();
  IntroducingCommitSet set{"QPID-4462",
                           {{"c1", parse_timestamp("2012-05-19T08:54:25Z")},
                            {"c2", parse_timestamp("2012-10-06T05:38:51Z")},
                            {"c3", parse_timestamp("2012-11-05T10:03:36Z")},
                            {"c4", parse_timestamp("2013-04-01T00:00:00Z")}},
                           SzzSource::basic};
  CHECK(szz_iv(set, t) == 14);
  const auto kept = discard_after(set, parse_timestamp("2013-03-31T21:51:49Z"));
  CHECK(kept.commits.size() == 3);
  CHECK(szz_iv({"K", {}, SzzSource::basic}, t) == std::nullopt);
  CHECK(szz_iv({"K", {{"late", parse_timestamp("2020-01-01")}}, SzzSource::basic}, t) == std::nullopt);
  CHECK(szz_iv({"K", {{"u", parse_timestamp("2012-05-18T20:54:25Z")}}, SzzSource::imported_u}, t) == 13);
}

TEST_CASE("basic SZZ recovers planted introducing commits") {
  test::TempDir tmp;
  test::HistoryBuilder h;
  const std::string a0 = test::lines({"class A {", "  int a;", "  int b;", "", "  int c;", "}"});
  const std::string b0 = test::lines({"class B {", "  int x;", "}"});
  h.commit("2012-01-01T00:00:00Z", "init", {{"src/A.java", a0}, {"src/B.java", b0}});
  const int intro1 = h.commit("2012-05-19T08:54:25Z", "add path handling",
                              {{"src/A.java", test::lines({"class A {", "  int a;", "  int bug;", "", "  int c;", "}"})}});
  const int intro2 = h.commit("2012-10-06T05:38:51Z", "tune",
                              {{"src/B.java", test::lines({"class B {", "  int bug2;", "}"})}});
  h.commit("2012-11-05T10:03:36Z", "unrelated",
           {{"src/A.java", test::lines({"class A {", "  int a;", "  int bug;", "", "  int d;", "}"})}});
  const int fix = h.commit(
      "2013-03-31T21:51:49Z", "[QPID-4462] fix path",
      {{"src/A.java", test::lines({"class A {", "  int a;", "  int fixed;", "  int d;", "}"})},
       {"src/B.java", test::lines({"class B {", "}"})},
       {"README", "notes\n"}});
  h.commit("2013-06-01T00:00:00Z", "later", {{"src/B.java", test::lines({"class B {", "  int y;", "}"})}});
  const auto ids = h.build(tmp / "repo");

  const GitRepository repo(tmp / "repo");
  const auto commits = extract_commits(repo);
  const CommitIndex index(commits);
  const auto timeline = test::qpid_timeline();
  const auto links = link_commits_to_issues(commits, {"QPID-4462"});
  const auto defect = derive_lifecycle(test::qpid_issue(), links[0], index, timeline);
  REQUIRE(defect.fix_commits == std::vector<std::string>{ids.at(fix)});

  const auto removed = removed_lines(index.at(ids.at(fix)));
  REQUIRE(removed.size() == 2);
  CHECK(removed[0].lines.size() == 1);  // the blank line 4 is ignored

  Blamer blamer(repo);
  for (const int jobs : {1, 4}) {
    SzzDiagnostics diag;
    const auto set = introducing_commits(defect, index, blamer, jobs, &diag);
    std::vector<std::string> got;
    for (const auto& c : set.commits) got.push_back(c.id);
    std::vector<std::string> planted{ids.at(intro1), ids.at(intro2)};
    std::sort(planted.begin(), planted.end());
    CHECK(got == planted);
    CHECK(szz_iv(set, timeline) == 14);
    CHECK(diag.messages.empty());
  }
  CHECK(blamer.blame_line("src/A.java", 1, ids.at(fix)) == ids.at(1));
  CHECK_THROWS_AS(blamer.blame_line("src/A.java", 99, ids.at(fix)), Error);
}

TEST_CASE("external SZZ import resolves prefixes and reports unknown hashes") {
  const auto commits = numbered(4);
  const CommitIndex index(commits);
  const std::string doc = "issue_key,introducing_commit_hash,source\n"
                          "K-1," + commits[0].id + ",U\n"
                          "K-1,bbbbbbbbbbbb,U\n"
                          "K-1,cccc,RA\n"
                          "K-2," + commits[3].id + ",u\n"
                          "K-2,0123456789abcdef,U\n";
  const auto imp = import_external_szz(doc, index);
  REQUIRE(imp.sets.size() == 3);
  REQUIRE(imp.skipped.size() == 1);
  CHECK(imp.skipped[0].key == "K-2");
  CHECK(imp.sets[0].source == SzzSource::imported_u);
  CHECK(imp.sets[0].issue_key == "K-1");
  CHECK(imp.sets[0].commits.size() == 2);
  CHECK(imp.sets[1].issue_key == "K-2");
  CHECK(imp.sets[2].source == SzzSource::imported_ra);
  CHECK(imp.sets[2].commits[0].id == commits[2].id);
  CHECK(imp.sets[2].commits[0].timestamp == commits[2].timestamp);

  CHECK(import_external_szz("", index).sets.empty());
  CHECK(import_external_szz("issue_key,introducing_commit_hash,source\n", index).sets.empty());
  CHECK_THROWS_AS(import_external_szz("issue_key,introducing_commit_hash,source\nK-1,aaaa,X\n", index), ParseError);
  CHECK_THROWS_AS(import_external_szz("key,hash\nK-1,aaaa\n", index), ParseError);
  CHECK(szz_source_name(SzzSource::imported_ra) == "RA");
}

TEST_CASE("five-row import with one bad hash") {
  const auto commits = numbered(5);
  const CommitIndex index(commits);
  std::string doc = "issue_key,introducing_commit_hash,source\n";
  doc += "K-1," + commits[0].id + ",U\n";
  doc += "K-2," + commits[1].id + ",U\n";
  doc += "K-3," + commits[2].id.substr(0, 8) + ",RA\n";
  doc += "K-4," + commits[3].id + ",RA\n";
  doc += "K-5,ffffffffffff,U\n";
  const auto imp = import_external_szz(doc, index);
  CHECK(imp.sets.size() == 4);
  CHECK(imp.skipped.size() == 1);
  CHECK(imp.skipped[0].index == 4);
}

TEST_CASE("addition-only fix yields an empty set") {
  test::TempDir tmp;
  test::HistoryBuilder h;
  h.commit("2012-01-01T00:00:00Z", "init", {{"src/A.java", test::lines({"class A {", "}"})}});
  h.commit("2013-03-31T21:51:49Z", "QPID-4462 guard", {{"src/A.java", test::lines({"class A {", "  int g;", "}"})}});
  h.build(tmp / "repo");
  const GitRepository repo(tmp / "repo");
  const auto commits = extract_commits(repo);
  const CommitIndex index(commits);
  const auto links = link_commits_to_issues(commits, {"QPID-4462"});
  const auto defect = derive_lifecycle(test::qpid_issue(), links[0], index, test::qpid_timeline());
  Blamer blamer(repo);
  const auto set = introducing_commits(defect, index, blamer);
  CHECK(set.commits.empty());
  CHECK_FALSE(szz_iv(set, test::qpid_timeline()));
}
