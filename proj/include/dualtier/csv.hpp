#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dualtier/common.hpp"

namespace dualtier {

/// Labeled tabular file as loaded from disk, before encoding. Cells are kept
/// as text; each column is classified numeric or categorical after the scan.
struct RawTable {
  std::vector<std::string> column_names;
  std::vector<std::vector<std::string>> rows;  // rows[r][c]
  std::string label_column;
  std::vector<bool> numeric;  // per column: every non-empty cell parses as a real

  std::size_t n_cols() const { return column_names.size(); }
  std::size_t n_rows() const { return rows.size(); }

  std::size_t column_index(const std::string& name) const {
    auto it = std::find(column_names.begin(), column_names.end(), name);
    if (it == column_names.end()) {
      throw DataError("column '" + name + "' not found");
    }
    return static_cast<std::size_t>(it - column_names.begin());
  }

  std::size_t label_index() const { return column_index(label_column); }
};

namespace detail {

/// Full-cell parse to a finite double. Textual "nan"/"inf" are rejected so a
/// column containing them falls back to categorical.
inline std::optional<double> parse_real(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;  // from_chars does not accept a leading '+'
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

inline std::string trim_ws(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim_ws(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline void strip_cr(std::string& s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

}  // namespace detail

/// Load a comma-separated file with a header row. A column is numeric iff
/// every non-empty cell parses as a finite real; otherwise categorical.
inline RawTable load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);

  RawTable table;
  table.label_column = label_column;

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  detail::strip_cr(line);
  table.column_names = detail::split_csv_line(line);
  if (table.column_names.empty()) throw DataError(path + ": empty header");

  const std::size_t n_cols = table.column_names.size();
  table.numeric.assign(n_cols, true);

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (cells.size() != n_cols) {
      throw DataError(path + ": line " + std::to_string(line_no) + ": expected " +
                      std::to_string(n_cols) + " fields, got " +
                      std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (table.numeric[c] && !cells[c].empty() &&
          !detail::parse_real(cells[c])) {
        table.numeric[c] = false;
      }
    }
    table.rows.push_back(std::move(cells));
  }

  if (std::find(table.column_names.begin(), table.column_names.end(),
                label_column) == table.column_names.end()) {
    throw DataError(path + ": label column '" + label_column + "' absent");
  }
  return table;
}

/// Remove the named columns (e.g. timestamps, raw IPs). Unknown names error.
inline RawTable drop_columns(const RawTable& table,
                             const std::vector<std::string>& names) {
  for (const auto& n : names) {
    if (n == table.label_column) {
      throw DataError("cannot drop the label column '" + n + "'");
    }
    table.column_index(n);  // existence check
  }
  RawTable out;
  out.label_column = table.label_column;
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < table.n_cols(); ++c) {
    if (std::find(names.begin(), names.end(), table.column_names[c]) ==
        names.end()) {
      keep.push_back(c);
      out.column_names.push_back(table.column_names[c]);
      out.numeric.push_back(table.numeric[c]);
    }
  }
  out.rows.reserve(table.n_rows());
  for (const auto& row : table.rows) {
    std::vector<std::string> cells;
    cells.reserve(keep.size());
    for (std::size_t c : keep) cells.push_back(row[c]);
    out.rows.push_back(std::move(cells));
  }
  return out;
}

}  // namespace dualtier
