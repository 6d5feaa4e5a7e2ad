#include <doctest.h>

#include <cmath>

#include "dlm/avlabel.hpp"
#include "dlm/lifecycle.hpp"
#include "fixtures.hpp"

using namespace dlm;

namespace {

DefectLifecycle defect(std::string key, int iv, int ov, int fv, long long fixed_at = 0) {
  DefectLifecycle d;
  d.issue_key = std::move(key);
  d.ov = ov;
  d.fv = fv;
  for (int v = iv; v < fv; ++v) d.ground_truth_avs.push_back(v);
  if (d.ground_truth_avs.empty() && iv > 0) d.ground_truth_avs.push_back(iv);
  d.fix_timestamp = from_unix(fixed_at);
  return d;
}

DefectLifecycle qpid() {
  DefectLifecycle d;
  d.issue_key = "QPID-4462";
  d.ov = 15;
  d.fv = 16;
  d.ground_truth_avs = {14, 15};
  return d;
}

}  // namespace

TEST_CASE("method names round-trip") {
  for (const Method m : kAllMethods) CHECK(parse_method(method_name(m)) == m);
  CHECK(parse_method(" szz_b+ ") == Method::szz_b_plus);
  CHECK_THROWS_AS(parse_method("SZZ_X"), Error);
  CHECK(estimate_source_name(EstimateSource::window) == "window");
}

TEST_CASE("proportion and IV estimates") {
  CHECK(proportion_of_defect(qpid()) == doctest::Approx(2.0));
  CHECK(proportion_of_defect(defect("A", 2, 5, 5)) == doctest::Approx(3.0));  // fv - ov clamped to 1
  DefectLifecycle none = qpid();
  none.ground_truth_avs.clear();
  CHECK_THROWS_AS(proportion_of_defect(none), Error);

  CHECK(std::abs(estimate_iv(16, 15, 1.7775) - 14.2225) < 1e-9);
  CHECK(std::abs(estimate_iv(16, 15, 1.8089) - 14.1911) < 1e-9);
  CHECK(std::abs(estimate_iv(16, 15, 2.167) - 13.833) < 1e-9);
  CHECK(estimate_iv(5, 5, 1.5) == doctest::Approx(3.5));
  CHECK(estimate_iv(3, 2, 4.0) == doctest::Approx(-1.0));
}

TEST_CASE("QPID-4462 proportion labelings") {
  const auto d = qpid();
  const std::pair<double, std::vector<int>> cases[] = {{1.7775, {15}}, {1.8089, {15}}, {2.167, {14, 15}}};
  for (const auto& [p, expected] : cases) {
    const auto l = proportion_labeling(d, {p, EstimateSource::increment, 5}, "P");
    CHECK(l.affected_versions() == expected);
    CHECK(l.fv() == 16);
    CHECK_FALSE(l.affected(16));
  }
  CHECK(simple_labeling(d).affected_versions() == std::vector<int>{15});
  CHECK(szz_labeling(d, 14).affected_versions() == std::vector<int>{14, 15});
  CHECK(szz_labeling(d, 13).affected_versions() == std::vector<int>{13, 14, 15});
  CHECK(szz_labeling(d, std::nullopt).affected_versions().empty());
  CHECK(ground_truth_labeling(d).affected_versions() == std::vector<int>{14, 15});
  CHECK(ground_truth_labeling(d).method() == "Actual");
}

TEST_CASE("label_versions keeps fractional IVs and never labels FV") {
  const auto l = label_versions(13.0000001, 16);
  CHECK_FALSE(l[12]);
  CHECK(l[13]);
  CHECK(l[14]);
  CHECK_FALSE(l[15]);
  const auto low = label_versions(-3.5, 3);
  CHECK(low == std::vector<bool>{true, true, false});
  CHECK(label_versions(3.0, 3) == std::vector<bool>{false, false, false});
}

TEST_CASE("WICKET-4071 merge follows the labeling rule") {
  const auto t = test::wicket_timeline();
  DefectLifecycle d;
  d.issue_key = "WICKET-4071";
  d.ov = *t.index_of("1.4.8");
  d.fv = *t.index_of("1.5-M1");
  for (const char* name : {"1.4.6", "1.4.7", "1.4.8", "1.4.19", "1.4.10", "1.5-M1"}) {
    d.ground_truth_avs.push_back(*t.index_of(name));
  }
  const auto simple = simple_labeling(d);
  const auto szz = szz_labeling(d, *t.index_of("1.4.10"));
  const auto plus = merge_plus(szz, simple, "SZZ_B+");
  CHECK(simple.affected_versions() == std::vector<int>{3, 4, 5});
  CHECK(szz.affected_versions() == std::vector<int>{5});
  CHECK(plus.affected_versions() == std::vector<int>{3, 4, 5});
  CHECK(plus.method() == "SZZ_B+");
  CHECK_THROWS_AS(merge_plus(szz, simple_labeling(qpid()), "x"), Error);
}

TEST_CASE("ColdStart takes the median of the other projects") {
  const std::map<std::string, double> avgs{{"A", 1.0}, {"B", 3.0}, {"C", 2.0}, {"QPID", 9.0}};
  const auto odd = coldstart_p(avgs, "QPID");
  CHECK(odd.value == doctest::Approx(2.0));
  CHECK(odd.support == 3);
  CHECK(odd.source == EstimateSource::coldstart);
  CHECK(coldstart_p(avgs, "C").value == doctest::Approx(3.0));
  CHECK(coldstart_p({{"A", 1.8089}, {"QPID", 5.0}}, "QPID").value == doctest::Approx(1.8089));
  CHECK_THROWS_WITH_AS(coldstart_p({{"QPID", 1.0}}, "QPID"), doctest::Contains("coldstart unavailable"), Error);
}

TEST_CASE("Increment needs five priors") {
  const ProportionEstimate fallback{1.8089, EstimateSource::coldstart, 3};
  const std::vector<double> four{1, 2, 3, 4};
  CHECK(increment_p(four, fallback).value == doctest::Approx(1.8089));
  const std::vector<double> five{1.5, 1.7, 1.9, 1.8, 1.9875};
  const auto e = increment_p(five, fallback);
  CHECK(e.value == doctest::Approx(1.7775));
  CHECK(e.source == EstimateSource::increment);
  CHECK(e.support == 5);
}

TEST_CASE("moving window uses the last one percent") {
  CHECK(window_size(0) == 1);
  CHECK(window_size(100) == 1);
  CHECK(window_size(101) == 2);
  CHECK(window_size(250) == 3);
  const ProportionEstimate fallback{1.8089, EstimateSource::coldstart, 1};
  CHECK(window_p({}, 10, fallback).source == EstimateSource::coldstart);
  const std::vector<double> priors{9.0, 2.0, 2.334};
  CHECK(window_p(priors, 10, fallback).value == doctest::Approx(2.334));
  CHECK(window_p(priors, 301, fallback).source == EstimateSource::coldstart);
  const auto w = window_p(priors, 150, fallback);
  CHECK(w.value == doctest::Approx(2.167));
  CHECK(w.support == 2);
}

TEST_CASE("trace follows fix order and strictly earlier fix versions") {
  std::vector<DefectLifecycle> ds;
  // six defects fixed in version 3, one in version 4; P = 2 for all but the last.
  for (int i = 0; i < 6; ++i) ds.push_back(defect("A-" + std::to_string(i), 1, 2, 3, 10 * i));
  ds.push_back(defect("A-9", 1, 3, 4, 100));  // P = 3
  const ProportionEstimate fallback{1.5, EstimateSource::constant, 0};
  const auto trace = trace_proportions(ds, fallback);
  for (int i = 0; i < 6; ++i) CHECK(trace.increment[i].source == EstimateSource::constant);
  CHECK(trace.increment[6].value == doctest::Approx(2.0));
  CHECK(trace.increment[6].support == 6);
  CHECK(trace.window[0].source == EstimateSource::constant);
  CHECK(trace.window[1].value == doctest::Approx(2.0));
  CHECK(trace.window[6].source == EstimateSource::window);
}

TEST_CASE("label_defects applies the requested methods") {
  std::vector<DefectLifecycle> ds{defect("K-1", 2, 3, 5, 1), defect("K-2", 1, 4, 6, 2)};
  LabelingInputs in;
  in.coldstart = {1.0, EstimateSource::constant, 0};
  in.szz_b = SzzIvMap{{"K-1", 1}};
  const std::vector<Method> all(std::begin(kAllMethods), std::end(kAllMethods));
  const auto labels = label_defects(ds, all, in);
  CHECK(labels.size() == 6);  // U and RA need their imports
  CHECK_FALSE(labels.count(Method::szz_u));
  CHECK(labels.at(Method::szz_b)[0].affected_versions() == std::vector<int>{1, 2, 3, 4});
  CHECK(labels.at(Method::szz_b)[1].affected_versions().empty());
  CHECK(labels.at(Method::szz_b_plus)[1].affected_versions() == std::vector<int>{4, 5});
  CHECK(labels.at(Method::proportion_coldstart)[0].affected_versions() == std::vector<int>{3, 4});
  CHECK(labels.at(Method::simple)[1].method() == "Simple");
  CHECK(method_available(Method::szz_ra_plus, in) == false);
  CHECK(method_available(Method::simple, in));
}
