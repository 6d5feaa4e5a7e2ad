#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dlm::csv {

using Row = std::vector<std::string>;

/// A parsed CSV document: header plus data rows. Fields follow RFC 4180
/// quoting; CRLF and LF line endings are both accepted.
class Table {
public:
  Table() = default;
  Table(Row header, std::vector<Row> rows);

  const Row& header() const { return header_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  /// Index of a header column, or nullopt.
  std::optional<std::size_t> column(std::string_view name) const;
  /// Index of a header column; throws ParseError naming the column if absent.
  std::size_t require_column(std::string_view name) const;

private:
  Row header_;
  std::vector<Row> rows_;
};

Table parse(std::string_view text);
Table read_file(const std::filesystem::path& path);

std::string quote(std::string_view field);

/// Accumulates a CSV document in memory so it can be written atomically.
class Writer {
public:
  explicit Writer(const Row& header);

  void add(const Row& row);
  std::size_t rows() const { return rows_; }
  const std::string& text() const { return text_; }

private:
  void append(const Row& row);

  std::string text_;
  std::size_t width_;
  std::size_t rows_ = 0;
};

/// Formats a real with the shortest round-trip representation.
std::string number(double value);
/// Formats an optional real; undefined values become the `NA` marker.
std::string number(const std::optional<double>& value);

inline constexpr std::string_view kUndefined = "NA";

}  // namespace dlm::csv

namespace dlm {

std::string read_text_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace dlm
