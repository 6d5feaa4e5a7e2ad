#pragma once

#include <string>
#include <vector>

#include "dlm/ingest.hpp"
#include "dlm/lifecycle.hpp"

namespace dlm::test {

/// Twelve early releases, then 0.18 .. 0.22 with the 0.19 and 0.21 baselines
/// listed so the exclusion globs can drop them. 0.16 .. 0.22 land on 13 .. 16.
inline std::vector<RawVersion> qpid_versions() {
  std::vector<RawVersion> v;
  const char* early[] = {"0.4", "0.5", "0.6", "0.7", "0.8", "0.9", "0.10", "0.11", "0.12", "0.13", "0.14", "0.15"};
  int month = 1;
  for (const char* name : early) {
    const std::string date = "2011-" + std::string(month < 10 ? "0" : "") + std::to_string(month) + "-15";
    v.push_back({name, parse_timestamp(date), true});
    ++month;
  }
  v.push_back({"0.16", parse_timestamp("2012-05-19T00:00:00Z"), true});
  v.push_back({"0.18", parse_timestamp("2012-09-20T00:00:00Z"), true});
  v.push_back({"0.19", parse_timestamp("2012-11-01T00:00:00Z"), true});
  v.push_back({"0.20", parse_timestamp("2012-12-20T00:00:00Z"), true});
  v.push_back({"0.21", parse_timestamp("2013-02-01T00:00:00Z"), true});
  v.push_back({"0.22", parse_timestamp("2013-04-15T00:00:00Z"), true});
  v.push_back({"0.24", std::nullopt, false});
  return v;
}

inline const std::vector<std::string>& qpid_exclusions() {
  static const std::vector<std::string> patterns{"0.19", "0.21"};
  return patterns;
}

inline VersionTimeline qpid_timeline() { return build_timeline(qpid_versions(), qpid_exclusions()); }

inline IssueRecord qpid_issue() {
  return {"QPID-4462", parse_timestamp("2013-01-10T09:00:00Z"), "Bug", "Closed", "Fixed", {"0.18", "0.20"}, {"0.22"}};
}

inline std::vector<CommitRecord> qpid_commits() {
  auto make = [](std::string id, const char* when, std::string msg) {
    CommitRecord c;
    c.id = std::move(id);
    c.timestamp = parse_timestamp(when);
    c.message = std::move(msg);
    return c;
  };
  return {make("4a11aa00", "2012-05-18T16:54:25Z", "refactor broker"),
          make("4b22bb00", "2012-05-18T20:54:25Z", "broker plumbing"),
          make("1c33cc00", "2012-05-19T08:54:25Z", "add path handling"),
          make("2d44dd00", "2012-10-06T05:38:51Z", "tune path handling"),
          make("3e55ee00", "2012-11-05T10:03:36Z", "path handling cleanup"),
          make("5f66ff00", "2013-02-20T12:00:00Z", "QPID-4462 first attempt"),
          make("732ab160852f943cd847646861dd48370dd23ff3", "2013-03-31T21:51:49+00:00", "[QPID-4462] fix path")};
}

/// WICKET releases in the walkthrough's order; 1.4.19 is taken verbatim and
/// dated between 1.4.8 and 1.4.10.
inline VersionTimeline wicket_timeline() {
  const std::vector<RawVersion> raw{{"1.4.6", parse_timestamp("2011-01-10"), true},
                                    {"1.4.7", parse_timestamp("2011-03-10"), true},
                                    {"1.4.8", parse_timestamp("2011-05-10"), true},
                                    {"1.4.19", parse_timestamp("2011-07-10"), true},
                                    {"1.4.10", parse_timestamp("2011-08-10"), true},
                                    {"1.5-M1", parse_timestamp("2011-10-10"), true}};
  return build_timeline(raw);
}

}  // namespace dlm::test
