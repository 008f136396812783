#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "caselasso/dataset.hpp"
#include "caselasso/error.hpp"

namespace caselasso::io {

/// Numeric table with a header row.
struct Table {
  std::vector<std::string> header;
  Matrix values;

  Index column(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == name) return static_cast<Index>(j);
    throw InputError("no column named '" + name + "'");
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_number(std::string_view field, std::size_t line, std::size_t col) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last)
    throw InputError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": cannot parse '" +
                     std::string(field) + "' as a number");
  return v;
}

}  // namespace detail

/// Comma-separated numbers; header row required; blank lines skipped.
/// Errors name the 1-based line and column.
inline Table read_csv(std::istream& in) {
  Table t;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line);
    if (t.header.empty()) {
      for (auto f : fields) t.header.emplace_back(f);
      continue;
    }
    if (fields.size() != t.header.size())
      throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(t.header.size()) +
                       " fields, found " + std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) row.push_back(detail::parse_number(fields[c], line_no, c + 1));
    rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw InputError("empty CSV: header row required");
  t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) t.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return t;
}

inline Table read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_csv(in);
}

/// Splits the table into predictors and response (`response` empty means the
/// last column) and centers it.
inline Dataset to_dataset(const Table& t, const std::string& response = {}, bool standardize = false) {
  if (t.header.size() < 2) throw InputError("CSV needs at least one predictor and a response column");
  const Index r = response.empty() ? static_cast<Index>(t.header.size()) - 1 : t.column(response);
  const Index p = static_cast<Index>(t.header.size()) - 1;
  Matrix x(t.values.rows(), p);
  std::vector<std::string> names;
  for (Index j = 0, c = 0; j < static_cast<Index>(t.header.size()); ++j) {
    if (j == r) continue;
    x.col(c++) = t.values.col(j);
    names.push_back(t.header[static_cast<std::size_t>(j)]);
  }
  return center_dataset(x, t.values.col(r), standardize, std::move(names), t.header[static_cast<std::size_t>(r)]);
}

/// %.17g, so values round-trip.
inline std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
  out << '\n';
}

}  // namespace caselasso::io
