#include "dlm/common.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace dlm {

namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) {
    throw ParseError("truncated timestamp '" + std::string(text) + "'");
  }
  int value = 0;
  auto first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc() || ptr != first + len) {
    throw ParseError("invalid timestamp '" + std::string(text) + "'");
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw ParseError("invalid timestamp '" + std::string(text) + "'");
  }
}

}  // namespace

Timestamp parse_timestamp(std::string_view raw) {
  using namespace std::chrono;
  const std::string owned = trim(raw);
  std::string_view text = owned;

  const int y = read_int(text, 0, 4);
  expect(text, 4, '-');
  const unsigned mo = static_cast<unsigned>(read_int(text, 5, 2));
  expect(text, 7, '-');
  const unsigned d = static_cast<unsigned>(read_int(text, 8, 2));
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok()) {
    throw ParseError("invalid calendar date '" + std::string(text) + "'");
  }
  sys_seconds result = sys_days{ymd};
  if (text.size() == 10) {
    return result;
  }
  if (text[10] != 'T' && text[10] != ' ') {
    throw ParseError("invalid timestamp '" + std::string(text) + "'");
  }
  const int hh = read_int(text, 11, 2);
  expect(text, 13, ':');
  const int mm = read_int(text, 14, 2);
  int ss = 0;
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    ss = read_int(text, 17, 2);
    pos = 19;
  }
  if (hh > 23 || mm > 59 || ss > 60) {
    throw ParseError("invalid time of day '" + std::string(text) + "'");
  }
  result += hours{hh} + minutes{mm} + seconds{ss};

  if (pos < text.size() && (text[pos] == '.' || text[pos] == ',')) {
    ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
  }
  if (pos == text.size()) {
    return result;
  }
  if (text[pos] == 'Z' && pos + 1 == text.size()) {
    return result;
  }
  // Some exports put a space before the offset.
  if (text[pos] == ' ') {
    ++pos;
  }
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    const int sign = text[pos] == '+' ? 1 : -1;
    const int oh = read_int(text, pos + 1, 2);
    std::size_t mpos = pos + 3;
    if (mpos < text.size() && text[mpos] == ':') {
      ++mpos;
    }
    const int om = read_int(text, mpos, 2);
    if (mpos + 2 != text.size()) {
      throw ParseError("trailing characters in timestamp '" + std::string(text) + "'");
    }
    // local = utc + offset  =>  utc = local - offset
    result -= sign * (hours{oh} + minutes{om});
    return result;
  }
  throw ParseError("invalid timestamp '" + std::string(text) + "'");
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss tod{t - day_point};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

Timestamp from_unix(long long seconds) { return Timestamp{std::chrono::seconds{seconds}}; }

long long to_unix(Timestamp t) { return t.time_since_epoch().count(); }

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace dlm
