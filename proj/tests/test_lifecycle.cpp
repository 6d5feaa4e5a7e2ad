#include <doctest.h>

#include <algorithm>
#include <random>

#include "dlm/ingest.hpp"
#include "dlm/lifecycle.hpp"
#include "fixtures.hpp"

using namespace dlm;

namespace {

DefectLifecycle defect(std::string key, int ov, int fv, std::vector<int> avs) {
  DefectLifecycle d;
  d.issue_key = std::move(key);
  d.ov = ov;
  d.fv = fv;
  d.ground_truth_avs = std::move(avs);
  return d;
}

}  // namespace

TEST_CASE("baseline exclusion puts 0.16 .. 0.22 on 13 .. 16") {
  const auto t = test::qpid_timeline();
  CHECK(t.size() == 16);
  CHECK(t.index_of("0.16") == 13);
  CHECK(t.index_of("0.18") == 14);
  CHECK(t.index_of("0.20") == 15);
  CHECK(t.index_of("0.22") == 16);
  CHECK_FALSE(t.index_of("0.19"));
  CHECK_FALSE(t.index_of("0.24"));
  const std::vector<std::string> glob{"0.1?", "0.2?"};
  CHECK(build_timeline(test::qpid_versions(), glob).size() == 6);
}

TEST_CASE("timeline order does not depend on input order") {
  auto raw = test::qpid_versions();
  const auto expected = build_timeline(raw);
  std::mt19937 rng(5);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(raw.begin(), raw.end(), rng);
    const auto t = build_timeline(raw);
    REQUIRE(t.size() == expected.size());
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(t.releases()[k].name == expected.releases()[k].name);
  }
}

TEST_CASE("date ties break by name and degenerate inputs") {
  const std::vector<RawVersion> tie{{"b", parse_timestamp("2020-01-01"), true},
                                    {"a", parse_timestamp("2020-01-01"), true}};
  const auto t = build_timeline(tie);
  CHECK(t.at(1).name == "a");
  const std::vector<RawVersion> one{{"1.0", parse_timestamp("2020-01-01"), true}};
  CHECK(build_timeline(one).size() == 1);
  const std::vector<RawVersion> none{{"1.0", std::nullopt, true}, {"2.0", parse_timestamp("2020-01-01"), false}};
  CHECK_THROWS_AS(build_timeline(none), Error);
  CHECK_THROWS_AS(t.at(3), Error);
}

TEST_CASE("timestamps map to the first release at or after them") {
  const auto t = test::qpid_timeline();
  CHECK(t.version_of_timestamp(parse_timestamp("2013-03-31T21:51:49Z")) == 16);
  CHECK(t.version_of_timestamp(parse_timestamp("2012-05-19T08:54:25Z")) == 14);
  CHECK(t.version_of_timestamp(parse_timestamp("2012-05-18T20:54:25Z")) == 13);
  CHECK(t.version_of_timestamp(t.at(15).release_date) == 15);
  CHECK_FALSE(t.version_of_timestamp(parse_timestamp("2014-01-01")));
  CHECK(t.current_version_at(parse_timestamp("2013-01-10")) == 15);
  CHECK(t.current_version_at(parse_timestamp("2000-01-01")) == 1);
}

TEST_CASE("version lists parse from CSV and tracker JSON") {
  const auto csv = parse_versions_csv("name,release_date,released\n1.0,2020-01-01,true\n2.0,,false\n3.0,2021-01-01,\n");
  REQUIRE(csv.size() == 3);
  CHECK(csv[0].release_date);
  CHECK_FALSE(csv[1].released);
  CHECK(csv[2].released);
  CHECK_THROWS_AS(parse_versions_csv("name,date\n1.0,2020\n"), ParseError);
  CHECK_THROWS_AS(parse_versions_csv("name,release_date,released\n1.0,2020-01-01,maybe\n"), ParseError);

  const auto json = parse_versions_json(
      R"([{"name":"0.18","releaseDate":"2012-09-20","released":true},{"name":"0.24","released":false},
          {"name":"0.23","archived":true}])");
  REQUIRE(json.size() == 3);
  CHECK(json[0].released);
  CHECK_FALSE(json[1].released);
  CHECK_FALSE(json[2].released);
  CHECK_THROWS_AS(parse_versions_json("{"), ParseError);
}

TEST_CASE("QPID-4462 life cycle") {
  const auto t = test::qpid_timeline();
  const auto commits = test::qpid_commits();
  const CommitIndex index(commits);
  const auto links = link_commits_to_issues(commits, {"QPID-4462"});
  const auto d = derive_lifecycle(test::qpid_issue(), links[0], index, t);
  CHECK(d.ov == 15);
  CHECK(d.fv == 16);
  CHECK(d.ground_truth_iv() == 14);
  CHECK(d.ground_truth_avs == std::vector<int>{14, 15});
  CHECK(d.fix_commits.back() == "732ab160852f943cd847646861dd48370dd23ff3");
  CHECK(format_timestamp(d.fix_timestamp) == "2013-03-31T21:51:49Z");
  const auto u = usability(d);
  CHECK(u.available);
  CHECK(u.consistent);
  CHECK(post_release_filter(d));
}

TEST_CASE("life cycle edge cases") {
  const auto t = test::qpid_timeline();
  const auto commits = test::qpid_commits();
  const CommitIndex index(commits);
  auto issue = test::qpid_issue();

  issue.created = parse_timestamp("2005-01-01");
  const IssueCommitLink link{"QPID-4462", {"732ab160852f943cd847646861dd48370dd23ff3"}};
  CHECK(derive_lifecycle(issue, link, index, t).ov == 1);

  // Created after the fix shipped: OV is clamped to FV.
  issue.created = parse_timestamp("2013-05-01");
  CHECK(derive_lifecycle(issue, link, index, t).ov == 16);

  const IssueCommitLink empty{"QPID-4462", {}};
  CHECK_THROWS_AS(derive_lifecycle(issue, empty, index, t), Excluded);

  std::vector<RawVersion> early = test::qpid_versions();
  early.resize(13);  // last release 0.16
  const auto short_t = build_timeline(early);
  try {
    derive_lifecycle(test::qpid_issue(), link, index, short_t);
    FAIL("expected exclusion");
  } catch (const Excluded& e) {
    CHECK(e.reason() == "unreleased fix");
  }

  issue = test::qpid_issue();
  issue.affected_version_names = {"0.19", "9.9"};
  const auto d = derive_lifecycle(issue, link, index, t);
  CHECK(d.ground_truth_avs.empty());
  CHECK_FALSE(usability(d).available);
  CHECK(post_release_filter(d));
}

TEST_CASE("usability and post-release filter") {
  CHECK_FALSE(usability(defect("A", 3, 5, {4})).consistent);
  CHECK(usability(defect("A", 3, 5, {3, 4})).consistent);
  CHECK_FALSE(post_release_filter(defect("A", 5, 5, {5})));
  CHECK(post_release_filter(defect("A", 3, 5, {2})));
}

TEST_CASE("fix-date order breaks ties by key") {
  std::vector<DefectLifecycle> ds{defect("B", 1, 2, {}), defect("A", 1, 2, {}), defect("C", 1, 2, {})};
  ds[0].fix_timestamp = from_unix(10);
  ds[1].fix_timestamp = from_unix(10);
  ds[2].fix_timestamp = from_unix(5);
  order_by_fix_date(ds);
  CHECK(ds[0].issue_key == "C");
  CHECK(ds[1].issue_key == "A");
  CHECK(ds[2].issue_key == "B");
}

TEST_CASE("RQ1 summary and selection thresholds") {
  ProjectDefects a{"A", 5, 8, {defect("A-1", 2, 3, {1}), defect("A-2", 2, 3, {3}), defect("A-3", 2, 3, {})}};
  ProjectDefects b{"B", 2, 4, {}};
  const std::vector<ProjectDefects> projects{a, b};
  const auto s = rq1_summary(projects);
  REQUIRE(s.projects.size() == 2);
  CHECK(s.projects[0].linked == 3);
  CHECK(s.projects[0].available == 2);
  CHECK(s.projects[0].consistent == 1);
  CHECK(s.projects[0].unusable() == 2);
  CHECK(*s.projects[0].pct_available == doctest::Approx(200.0 / 3));
  CHECK_FALSE(s.projects[1].pct_available);
  CHECK(s.totals.project == "TOTAL");
  CHECK(s.totals.defects == 7);
  CHECK(s.totals.linked == 3);
  CHECK(s.totals.consistent == 1);

  const SelectionThresholds loose{1, 6, 30.0};
  CHECK(selection_failures(s.projects[0], loose).empty());
  CHECK(selection_failures(s.projects[1], loose).size() == 3);
  CHECK(selection_failures(s.projects[0]).size() == 2);
  CHECK(select_projects(s.projects, loose) == std::vector<std::string>{"A"});
}
