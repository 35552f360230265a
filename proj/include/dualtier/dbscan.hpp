#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

#include "dualtier/clusters.hpp"
#include "dualtier/matrix.hpp"

namespace dualtier {

struct DbscanParams {
  double eps = 0.0;  // <= 0: pick per batch via median_knn_distance(min_pts)
  std::size_t min_pts = 5;

  void validate() const {
    if (min_pts < 1) throw ConfigError("dbscan: min_pts must be >= 1");
  }
};

namespace cluster_detail {

inline double euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace cluster_detail

/// Median distance to the k-th nearest neighbor (self excluded): the eps
/// heuristic for batches of unknown scale.
inline double median_knn_distance(const FeatureMatrix& points, std::size_t k) {
  if (points.n_rows < 2) return 1.0;
  std::vector<double> kth(points.n_rows);
  std::vector<double> dists;
  for (std::size_t i = 0; i < points.n_rows; ++i) {
    dists.clear();
    for (std::size_t j = 0; j < points.n_rows; ++j) {
      if (j == i) continue;
      dists.push_back(cluster_detail::euclidean(points.row(i), points.row(j)));
    }
    const std::size_t idx = std::min(k, dists.size()) - 1;
    std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(idx),
                     dists.end());
    kth[i] = dists[idx];
  }
  std::sort(kth.begin(), kth.end());
  const std::size_t n = kth.size();
  const double median =
      n % 2 == 1 ? kth[n / 2] : (kth[n / 2 - 1] + kth[n / 2]) / 2.0;
  return median;
}

/// Classic density clustering: a core point has at least min_pts neighbors
/// within eps (itself included); clusters are the connected components of
/// core points, with border points attached to the first core cluster that
/// reaches them in scan order. Everything else is noise (-1). Deterministic
/// for a fixed row order.
inline ClusterAssignment dbscan(const FeatureMatrix& points,
                                const DbscanParams& params) {
  params.validate();
  if (points.n_rows == 0) throw DataError("dbscan: empty input");
  double eps = params.eps;
  if (eps <= 0.0) eps = median_knn_distance(points, params.min_pts);

  constexpr int kUnvisited = -2;
  constexpr int kNoise = -1;
  const std::size_t n = points.n_rows;

  auto region_query = [&](std::size_t i) {
    std::vector<std::size_t> neighbors;
    for (std::size_t j = 0; j < n; ++j) {
      if (cluster_detail::euclidean(points.row(i), points.row(j)) <= eps) {
        neighbors.push_back(j);
      }
    }
    return neighbors;
  };

  ClusterAssignment out;
  out.labels.assign(n, kUnvisited);
  int next_cluster = 0;

  for (std::size_t i = 0; i < n; ++i) {
    if (out.labels[i] != kUnvisited) continue;
    auto neighbors = region_query(i);
    if (neighbors.size() < params.min_pts) {
      out.labels[i] = kNoise;
      continue;
    }
    const int cluster = next_cluster++;
    out.labels[i] = cluster;
    std::deque<std::size_t> seeds(neighbors.begin(), neighbors.end());
    while (!seeds.empty()) {
      const std::size_t j = seeds.front();
      seeds.pop_front();
      if (out.labels[j] == kNoise) out.labels[j] = cluster;  // border point
      if (out.labels[j] != kUnvisited) continue;
      out.labels[j] = cluster;
      auto expansion = region_query(j);
      if (expansion.size() >= params.min_pts) {
        seeds.insert(seeds.end(), expansion.begin(), expansion.end());
      }
    }
  }
  out.n_clusters = static_cast<std::size_t>(next_cluster);
  return out;
}

}  // namespace dualtier
