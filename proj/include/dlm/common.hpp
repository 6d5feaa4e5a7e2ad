#pragma once

#include <chrono>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace dlm {

/// Seconds-resolution UTC instant. All timestamps are normalized to UTC when parsed.
using Timestamp = std::chrono::sys_seconds;

/// 1-based position of a release in a VersionTimeline.
using VersionIndex = int;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

// Thrown when a defect drops out of the analysis for a documented reason
// (unlinked, unreleased fix, ...). Callers catch it and record the reason.
class Excluded : public Error {
public:
  Excluded(std::string issue_key, std::string reason)
      : Error(issue_key + ": " + reason), issue_key_(std::move(issue_key)),
        reason_(std::move(reason)) {}

  const std::string& issue_key() const { return issue_key_; }
  const std::string& reason() const { return reason_; }

private:
  std::string issue_key_;
  std::string reason_;
};

/// Parses ISO-8601 timestamps as produced by issue trackers and git:
/// `2013-03-31T21:51:49+00:00`, `2012-11-21T13:45:12.000+0000`, `...Z`,
/// `2013-03-31 21:51:49`, or a bare date (`2013-03-31`, midnight UTC).
/// Offsets are applied so the result is UTC.
Timestamp parse_timestamp(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_timestamp(Timestamp t);

Timestamp from_unix(long long seconds);
long long to_unix(Timestamp t);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

}  // namespace dlm
