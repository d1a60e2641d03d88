#pragma once

// RFC 4180 style CSV: comma separated, CRLF-free ("\n") records, a mandatory
// header row, fields quoted when they contain a comma, quote or line break
// (embedded quotes doubled). Reals are written with 17 significant digits so
// that reading them back recovers the exact double.

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "zdyn/errors.hpp"

namespace zdyn::cli {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  if (s == "nan") return NAN;
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InvalidInput("not a number: '" + std::string(s) + "'");
  return v;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

using CsvRow = std::vector<std::string>;

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const CsvRow& header) : os_(os), columns_(header.size()) { write(header); }

  void row(const CsvRow& cells) {
    if (cells.size() != columns_) throw InvalidInput("csv row width does not match the header");
    write(cells);
  }

 private:
  void write(const CsvRow& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << csv_field(cells[i]);
    }
    os_ << '\n';
  }

  std::ostream& os_;
  std::size_t columns_;
};

struct CsvTable {
  CsvRow header;
  std::vector<CsvRow> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw InvalidInput("csv has no column '" + std::string(name) + "'");
  }
};

/// Parses a whole CSV document. Every record must have the header's width.
inline CsvTable read_csv(std::istream& is) {
  std::vector<CsvRow> records;
  CsvRow current;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  char c;
  auto end_field = [&] {
    current.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  while (is.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          is.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started && field.empty()) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && is.peek() == '\n') is.get(c);
      end_field();
      records.push_back(std::move(current));
      current.clear();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw InvalidInput("csv: unterminated quoted field");
  if (field_started || !field.empty() || !current.empty()) {
    end_field();
    records.push_back(std::move(current));
  }
  if (records.empty()) throw InvalidInput("csv: missing header row");
  CsvTable t;
  t.header = std::move(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != t.header.size())
      throw InvalidInput("csv: record " + std::to_string(i + 1) + " has " + std::to_string(records[i].size()) +
                         " fields, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(records[i]));
  }
  return t;
}

/// Empty cells encode "not available".
inline std::string optional_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace zdyn::cli
