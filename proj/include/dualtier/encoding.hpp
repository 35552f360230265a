#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "dualtier/csv.hpp"
#include "dualtier/matrix.hpp"

namespace dualtier {

/// Label encoding for the categorical feature columns of a table: per column,
/// a total map category -> integer code assigned in first-appearance order.
/// The label column is never part of the map.
struct EncodingMap {
  struct ColumnCodes {
    std::vector<std::string> categories;            // code -> category
    std::unordered_map<std::string, int> code_of;   // category -> code
  };
  std::map<std::string, ColumnCodes> columns;  // keyed by column name, sorted

  bool covers(const std::string& column) const {
    return columns.find(column) != columns.end();
  }

  int encode(const std::string& column, const std::string& category) const {
    const auto& col = columns.at(column);
    auto it = col.code_of.find(category);
    return it == col.code_of.end() ? -1 : it->second;
  }

  const std::string& decode(const std::string& column, int code) const {
    return columns.at(column).categories.at(static_cast<std::size_t>(code));
  }

  std::size_t cardinality(const std::string& column) const {
    return columns.at(column).categories.size();
  }
};

/// Scan the table's categorical feature columns and assign codes in
/// first-appearance order.
inline EncodingMap fit_label_encoding(const RawTable& table) {
  if (table.n_rows() == 0) throw DataError("fit_label_encoding: empty table");
  EncodingMap map;
  const std::size_t label_idx = table.label_index();
  for (std::size_t c = 0; c < table.n_cols(); ++c) {
    if (c == label_idx || table.numeric[c]) continue;
    auto& col = map.columns[table.column_names[c]];
    for (const auto& row : table.rows) {
      const std::string& cell = row[c];
      if (col.code_of.find(cell) == col.code_of.end()) {
        col.code_of.emplace(cell, static_cast<int>(col.categories.size()));
        col.categories.push_back(cell);
      }
    }
  }
  return map;
}

/// Encode a table to an all-numeric FeatureMatrix. Feature cells in
/// categorical columns are replaced by their codes; a cell that already parses
/// as a number is taken at face value, which makes the operation idempotent on
/// encoded data. Unseen categories error in strict mode and receive the
/// sentinel code (= training cardinality) otherwise. Empty numeric cells
/// become 0. The label column is carried into the matrix's labels, not the
/// feature block.
inline FeatureMatrix apply_encoding(const RawTable& table, const EncodingMap& map,
                                    bool strict = false) {
  const std::size_t label_idx = table.label_index();
  for (std::size_t c = 0; c < table.n_cols(); ++c) {
    if (c != label_idx && !table.numeric[c] && !map.covers(table.column_names[c])) {
      throw DataError("apply_encoding: no codes for categorical column '" +
                      table.column_names[c] + "'");
    }
  }

  FeatureMatrix m;
  m.n_cols = table.n_cols() - 1;
  m.values.reserve(table.n_rows() * m.n_cols);
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
      if (c == label_idx) continue;
      const std::string& cell = row[c];
      if (auto v = detail::parse_real(cell)) {
        m.values.push_back(*v);
        continue;
      }
      if (table.numeric[c]) {  // empty cell in a numeric column
        m.values.push_back(0.0);
        continue;
      }
      const std::string& column = table.column_names[c];
      const int code = map.encode(column, cell);
      if (code >= 0) {
        m.values.push_back(static_cast<double>(code));
      } else if (strict) {
        throw DataError("apply_encoding: unseen category '" + cell +
                        "' in column '" + column + "'");
      } else {
        m.values.push_back(static_cast<double>(map.cardinality(column)));
      }
    }
    ++m.n_rows;
    const std::string& label = row[label_idx];
    int id = m.class_id(label);
    if (id < 0) {
      id = static_cast<int>(m.class_names.size());
      m.class_names.push_back(label);
    }
    m.labels.push_back(id);
  }
  return m;
}

}  // namespace dualtier
