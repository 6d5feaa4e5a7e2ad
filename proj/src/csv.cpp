#include "dlm/csv.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "dlm/common.hpp"

namespace dlm::csv {

Table::Table(Row header, std::vector<Row> rows) : header_(std::move(header)), rows_(std::move(rows)) {}

std::optional<std::size_t> Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t Table::require_column(std::string_view name) const {
  if (auto idx = column(name)) return *idx;
  throw ParseError("CSV is missing column '" + std::string(name) + "'");
}

Table parse(std::string_view text) {
  std::vector<Row> records;
  Row current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;

  auto end_field = [&] {
    current.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // Skip blank lines entirely.
    if (!(current.size() == 1 && current[0].empty())) {
      records.push_back(std::move(current));
    }
    current.clear();
  };

  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_record();
    } else if (c == '\r') {
      // handled by the following '\n'
    } else {
      field.push_back(c);
      field_started = true;
    }
    ++i;
  }
  if (in_quotes) {
    throw ParseError("unterminated quoted CSV field");
  }
  if (field_started || !field.empty() || !current.empty()) {
    end_record();
  }
  if (records.empty()) {
    return {};
  }
  Row header = std::move(records.front());
  for (auto& h : header) h = trim(h);
  records.erase(records.begin());
  return Table(std::move(header), std::move(records));
}

Table read_file(const std::filesystem::path& path) { return parse(read_text_file(path)); }

std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Writer::Writer(const Row& header) : width_(header.size()) { append(header); }

void Writer::add(const Row& row) {
  if (row.size() != width_) {
    throw Error(fmt::format("CSV row has {} fields, header has {}", row.size(), width_));
  }
  append(row);
  ++rows_;
}

void Writer::append(const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) text_.push_back(',');
    text_ += quote(row[i]);
  }
  text_.push_back('\n');
}

std::string number(double value) {
  if (!std::isfinite(value)) return std::string(kUndefined);
  if (value == 0.0) return "0";  // folds -0
  return fmt::format("{}", value);
}

std::string number(const std::optional<double>& value) {
  return value ? number(*value) : std::string(kUndefined);
}

}  // namespace dlm::csv

namespace dlm {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace dlm
