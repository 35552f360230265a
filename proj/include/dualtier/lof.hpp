#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "dualtier/common.hpp"
#include "dualtier/matrix.hpp"

namespace dualtier {

namespace lof_detail {

/// Local reachability density cap for zero reachability sums (duplicated
/// points). Capping both sides of the LOF ratio makes duplicates score
/// exactly 1.
constexpr double kLrdCap = 1e12;

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

struct Neighbor {
  double dist;
  std::size_t index;
  bool operator<(const Neighbor& o) const {
    return dist != o.dist ? dist < o.dist : index < o.index;
  }
};

/// The k nearest training points to `row`, ties broken by lower index so the
/// neighborhood is deterministic. `skip` excludes one training index (used
/// for leave-self-out scoring of training points).
inline std::vector<Neighbor> k_nearest(const FeatureMatrix& train,
                                       std::span<const double> row,
                                       std::size_t k, std::size_t skip) {
  std::vector<Neighbor> all;
  all.reserve(train.n_rows);
  for (std::size_t j = 0; j < train.n_rows; ++j) {
    if (j == skip) continue;
    all.push_back({std::sqrt(sq_dist(row, train.row(j))), j});
  }
  const std::size_t take = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take),
                    all.end());
  all.resize(take);
  return all;
}

constexpr std::size_t kNoSkip = std::numeric_limits<std::size_t>::max();

}  // namespace lof_detail

/// Classic local-outlier-factor model in novelty mode: the training points
/// are retained together with each point's k-distance and local reachability
/// density (both computed leave-self-out). A query's LOF is the ratio of its
/// neighbors' mean lrd to its own; values near 1 mean the query sits in a
/// region as dense as its neighbors', larger values mean it is isolated.
/// The exported score is -LOF so that larger = more normal.
struct LofModel {
  std::size_t n_features = 0;
  std::size_t k = 0;
  FeatureMatrix train;           // unlabeled copy of the training rows
  std::vector<double> k_dist;    // per training point
  std::vector<double> lrd;       // per training point

  double lof(std::span<const double> row,
             std::size_t skip = lof_detail::kNoSkip) const {
    const auto neighbors = lof_detail::k_nearest(train, row, k, skip);
    double reach_sum = 0.0;
    double lrd_sum = 0.0;
    for (const auto& nb : neighbors) {
      reach_sum += std::max(k_dist[nb.index], nb.dist);
      lrd_sum += lrd[nb.index];
    }
    const double n = static_cast<double>(neighbors.size());
    const double lrd_row =
        reach_sum == 0.0 ? lof_detail::kLrdCap : n / reach_sum;
    return lrd_sum / (n * lrd_row);
  }

  /// Normality score, higher = more normal.
  double score(std::span<const double> row) const { return -lof(row); }

  /// Leave-self-out score of training point i (used for threshold fitting).
  double train_score(std::size_t i) const { return -lof(train.row(i), i); }
};

inline LofModel fit_lof_model(const FeatureMatrix& train, std::size_t k) {
  if (train.n_rows <= k) {
    throw DataError("fit_lof: need more than k=" + std::to_string(k) +
                    " training rows, got " + std::to_string(train.n_rows));
  }
  LofModel model;
  model.n_features = train.n_cols;
  model.k = k;
  model.train.n_rows = train.n_rows;
  model.train.n_cols = train.n_cols;
  model.train.values = train.values;

  // pass 1: k-distances (neighbors exclude the point itself)
  model.k_dist.resize(train.n_rows);
  std::vector<std::vector<lof_detail::Neighbor>> hoods(train.n_rows);
  for (std::size_t i = 0; i < train.n_rows; ++i) {
    hoods[i] = lof_detail::k_nearest(model.train, train.row(i), k, i);
    model.k_dist[i] = hoods[i].back().dist;
  }

  // pass 2: local reachability densities
  model.lrd.resize(train.n_rows);
  for (std::size_t i = 0; i < train.n_rows; ++i) {
    double reach_sum = 0.0;
    for (const auto& nb : hoods[i]) {
      reach_sum += std::max(model.k_dist[nb.index], nb.dist);
    }
    model.lrd[i] = reach_sum == 0.0
                       ? lof_detail::kLrdCap
                       : static_cast<double>(hoods[i].size()) / reach_sum;
  }
  return model;
}

}  // namespace dualtier
