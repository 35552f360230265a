// Test-only reference implementations, kept independent of the library's
// algorithm code paths: naive all-pairs LOF, textbook DBSCAN via explicit
// core-graph components, and synthetic blob data.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "dualtier/common.hpp"
#include "dualtier/matrix.hpp"

namespace oracles {

inline double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline std::vector<std::vector<double>> to_rows(const dualtier::FeatureMatrix& m) {
  std::vector<std::vector<double>> rows(m.n_rows);
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    rows[i].assign(m.row(i).begin(), m.row(i).end());
  }
  return rows;
}

// ---- naive LOF -------------------------------------------------------------

constexpr double kNaiveLrdCap = 1e12;
constexpr std::ptrdiff_t kQuery = -1;

// k nearest training indices to `point`, excluding `self`, ties by index.
inline std::vector<std::size_t> naive_knn(
    const std::vector<std::vector<double>>& train, const std::vector<double>& point,
    std::size_t k, std::ptrdiff_t self) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t j = 0; j < train.size(); ++j) {
    if (static_cast<std::ptrdiff_t>(j) == self) continue;
    all.emplace_back(dist(point, train[j]), j);
  }
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < std::min(k, all.size()); ++i) out.push_back(all[i].second);
  return out;
}

inline double naive_kdist(const std::vector<std::vector<double>>& train,
                          std::size_t i, std::size_t k) {
  const auto nn = naive_knn(train, train[i], k, static_cast<std::ptrdiff_t>(i));
  return dist(train[i], train[nn.back()]);
}

inline double naive_lrd_of_train(const std::vector<std::vector<double>>& train,
                                 std::size_t i, std::size_t k) {
  const auto nn = naive_knn(train, train[i], k, static_cast<std::ptrdiff_t>(i));
  double reach = 0.0;
  for (std::size_t o : nn) {
    reach += std::max(naive_kdist(train, o, k), dist(train[i], train[o]));
  }
  return reach == 0.0 ? kNaiveLrdCap : static_cast<double>(nn.size()) / reach;
}

// LOF of `point` against `train`; self = index when the point is a training
// row scored leave-one-out, kQuery otherwise.
inline double naive_lof(const std::vector<std::vector<double>>& train,
                        const std::vector<double>& point, std::size_t k,
                        std::ptrdiff_t self = kQuery) {
  const auto nn = naive_knn(train, point, k, self);
  double reach = 0.0;
  double lrd_sum = 0.0;
  for (std::size_t o : nn) {
    reach += std::max(naive_kdist(train, o, k), dist(point, train[o]));
    lrd_sum += naive_lrd_of_train(train, o, k);
  }
  const double n = static_cast<double>(nn.size());
  const double lrd_point = reach == 0.0 ? kNaiveLrdCap : n / reach;
  return lrd_sum / (n * lrd_point);
}

// ---- naive DBSCAN ----------------------------------------------------------

// Textbook route: core flags from neighbor counts, clusters = BFS components
// of the core graph (numbered by the smallest-index core), border points
// attached to the earliest-numbered cluster with a core neighbor.
inline std::vector<int> naive_dbscan(const dualtier::FeatureMatrix& m, double eps,
                                     std::size_t min_pts) {
  const auto rows = to_rows(m);
  const std::size_t n = rows.size();
  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (dist(rows[i], rows[j]) <= eps) neighbors[i].push_back(j);
    }
  }
  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) core[i] = neighbors[i].size() >= min_pts;

  std::vector<int> labels(n, -1);
  int cid = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || labels[i] != -1) continue;
    std::deque<std::size_t> queue{i};
    labels[i] = cid;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v : neighbors[u]) {
        if (core[v] && labels[v] == -1) {
          labels[v] = cid;
          queue.push_back(v);
        }
      }
    }
    ++cid;
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (core[j] || labels[j] != -1) continue;
    int best = -1;
    for (std::size_t c : neighbors[j]) {
      if (core[c] && (best == -1 || labels[c] < best)) best = labels[c];
    }
    labels[j] = best;
  }
  return labels;
}

// Partition equality up to relabeling; noise (-1) must match exactly.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> fwd, bwd;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] == -1) != (b[i] == -1)) return false;
    if (a[i] == -1) continue;
    auto f = fwd.find(a[i]);
    if (f == fwd.end()) {
      fwd[a[i]] = b[i];
    } else if (f->second != b[i]) {
      return false;
    }
    auto g = bwd.find(b[i]);
    if (g == bwd.end()) {
      bwd[b[i]] = a[i];
    } else if (g->second != a[i]) {
      return false;
    }
  }
  return true;
}

// ---- synthetic data --------------------------------------------------------

struct BlobSpec {
  std::string label;
  std::vector<double> center;
  double sigma = 0.03;
  std::size_t count = 0;
};

inline dualtier::FeatureMatrix make_blobs(const std::vector<BlobSpec>& blobs,
                                          std::uint64_t seed,
                                          bool shuffle_rows = false) {
  dualtier::Rng rng(seed);
  dualtier::FeatureMatrix m;
  std::vector<double> row;
  for (const auto& blob : blobs) {
    for (std::size_t i = 0; i < blob.count; ++i) {
      row.clear();
      for (double c : blob.center) row.push_back(c + blob.sigma * rng.normal());
      m.push_row(row, blob.label);
    }
  }
  if (shuffle_rows) {
    std::vector<std::size_t> order(m.n_rows);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    m = dualtier::select_rows(m, order);
  }
  return m;
}

}  // namespace oracles
