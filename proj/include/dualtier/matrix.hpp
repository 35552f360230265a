#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dualtier/common.hpp"

namespace dualtier {

/// Dense row-major numeric table. Rows are traffic records; an optional label
/// vector maps each row to a class id, with `class_names` translating ids to
/// class names. Labels are carried by name across operations so that class ids
/// never need to agree between two matrices.
struct FeatureMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> values;            // row-major, n_rows * n_cols
  std::vector<int> labels;               // empty, or one class id per row
  std::vector<std::string> class_names;  // class id -> name

  bool has_labels() const { return !labels.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * n_cols, n_cols};
  }

  double at(std::size_t r, std::size_t c) const { return values[r * n_cols + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * n_cols + c]; }

  const std::string& label_name(std::size_t i) const {
    return class_names[static_cast<std::size_t>(labels[i])];
  }

  /// Id of `name` in class_names, or -1.
  int class_id(const std::string& name) const {
    for (std::size_t i = 0; i < class_names.size(); ++i) {
      if (class_names[i] == name) return static_cast<int>(i);
    }
    return -1;
  }

  void push_row(std::span<const double> cells) {
    if (n_rows == 0 && n_cols == 0) n_cols = cells.size();
    if (cells.size() != n_cols) {
      throw DataError("push_row: expected " + std::to_string(n_cols) +
                      " cells, got " + std::to_string(cells.size()));
    }
    values.insert(values.end(), cells.begin(), cells.end());
    ++n_rows;
  }

  void push_row(std::span<const double> cells, const std::string& label) {
    push_row(cells);
    int id = class_id(label);
    if (id < 0) {
      id = static_cast<int>(class_names.size());
      class_names.push_back(label);
    }
    labels.push_back(id);
  }
};

/// Throws if any value is NaN or infinite.
inline void assert_finite(const FeatureMatrix& m, const std::string& context) {
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    if (!std::isfinite(m.values[i])) {
      throw DataError(context + ": non-finite value at row " +
                      std::to_string(i / m.n_cols) + ", column " +
                      std::to_string(i % m.n_cols));
    }
  }
}

/// New matrix holding the given rows (in the given order); labels and the
/// class-name table are carried over when present.
inline FeatureMatrix select_rows(const FeatureMatrix& m,
                                 const std::vector<std::size_t>& indices) {
  FeatureMatrix out;
  out.n_cols = m.n_cols;
  out.class_names = m.class_names;
  out.values.reserve(indices.size() * m.n_cols);
  for (std::size_t idx : indices) {
    const auto r = m.row(idx);
    out.values.insert(out.values.end(), r.begin(), r.end());
    if (m.has_labels()) out.labels.push_back(m.labels[idx]);
  }
  out.n_rows = indices.size();
  return out;
}

/// Per-class row counts, indexed by class id.
inline std::vector<std::size_t> class_histogram(const FeatureMatrix& m) {
  std::vector<std::size_t> counts(m.class_names.size(), 0);
  for (int id : m.labels) ++counts[static_cast<std::size_t>(id)];
  return counts;
}

}  // namespace dualtier
