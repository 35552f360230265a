#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dualtier/matrix.hpp"

namespace dualtier {

/// Per-column min/max learned from a fitting set. Parameters are fit on the
/// training split only and applied to held-out data with clipping, so test
/// information never leaks into the scaling.
struct NormalizationParams {
  std::vector<double> x_min;
  std::vector<double> x_max;

  std::size_t n_cols() const { return x_min.size(); }
  bool degenerate(std::size_t c) const { return x_min[c] == x_max[c]; }
};

inline NormalizationParams fit_minmax(const FeatureMatrix& m) {
  if (m.n_rows == 0) throw DataError("fit_minmax: empty matrix");
  NormalizationParams p;
  p.x_min.assign(m.n_cols, 0.0);
  p.x_max.assign(m.n_cols, 0.0);
  for (std::size_t c = 0; c < m.n_cols; ++c) {
    double lo = m.at(0, c), hi = m.at(0, c);
    for (std::size_t r = 1; r < m.n_rows; ++r) {
      lo = std::min(lo, m.at(r, c));
      hi = std::max(hi, m.at(r, c));
    }
    p.x_min[c] = lo;
    p.x_max[c] = hi;
  }
  return p;
}

/// (x - x_min) / (x_max - x_min), clipped to [0, 1]. Degenerate columns
/// (x_max == x_min, common in real IDS exports) map to 0.
inline FeatureMatrix apply_minmax(const FeatureMatrix& m,
                                  const NormalizationParams& p) {
  if (p.n_cols() != m.n_cols) {
    throw DataError("apply_minmax: params have " + std::to_string(p.n_cols()) +
                    " columns, matrix has " + std::to_string(m.n_cols));
  }
  FeatureMatrix out = m;
  for (std::size_t r = 0; r < m.n_rows; ++r) {
    for (std::size_t c = 0; c < m.n_cols; ++c) {
      double& v = out.at(r, c);
      if (p.degenerate(c)) {
        v = 0.0;
      } else {
        v = std::clamp((v - p.x_min[c]) / (p.x_max[c] - p.x_min[c]), 0.0, 1.0);
      }
    }
  }
  return out;
}

}  // namespace dualtier
