#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "dualtier/clusters.hpp"
#include "dualtier/dbscan.hpp"  // euclidean
#include "dualtier/matrix.hpp"

namespace dualtier {

/// Density-peak clustering parameters. Peaks are picked automatically: either
/// the top-m points by gamma = rho * delta (default), or every point clearing
/// explicit (rho_min, delta_min) thresholds; the manual decision-graph step
/// of the original method has to be automated for unattended retraining.
struct DpcParams {
  double dc = 0.0;        // <= 0: distance at the 2% quantile of all pairs
  std::size_t peaks = 3;  // top-m by gamma (ignored when thresholds set)
  bool use_thresholds = false;
  double rho_min = 0.0;
  double delta_min = 0.0;
};

/// The decision-graph quantities behind DPC. rho_i counts points strictly
/// closer than dc (self excluded). delta_i is the distance to the nearest
/// point of higher density (density ties are ordered by index, making the
/// ordering total), and the global density peak takes its maximum distance
/// to any point. parent_i is that nearest higher-density point (-1 for the
/// global peak).
struct DpcDiagnostics {
  double dc = 0.0;
  std::vector<double> rho;
  std::vector<double> delta;
  std::vector<int> parent;
  std::vector<std::size_t> order;  // indices by (rho desc, index asc)
  double max_pairwise = 0.0;
};

inline DpcDiagnostics dpc_diagnostics(const FeatureMatrix& points,
                                      const DpcParams& params) {
  const std::size_t n = points.n_rows;
  if (n < 2) throw DataError("dpc: need at least 2 points");

  std::vector<double> dist(n * n, 0.0);
  DpcDiagnostics diag;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = cluster_detail::euclidean(points.row(i), points.row(j));
      dist[i * n + j] = d;
      dist[j * n + i] = d;
      diag.max_pairwise = std::max(diag.max_pairwise, d);
    }
  }

  diag.dc = params.dc;
  if (diag.dc <= 0.0 && diag.max_pairwise > 0.0) {
    std::vector<double> upper;
    upper.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) upper.push_back(dist[i * n + j]);
    }
    std::sort(upper.begin(), upper.end());
    const std::size_t pos = static_cast<std::size_t>(
        std::floor(0.02 * static_cast<double>(upper.size() - 1)));
    diag.dc = upper[pos];
    if (diag.dc <= 0.0) {  // leading ties at zero distance
      auto it = std::upper_bound(upper.begin(), upper.end(), 0.0);
      diag.dc = it == upper.end() ? diag.max_pairwise : *it;
    }
  }

  diag.rho.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && dist[i * n + j] < diag.dc) diag.rho[i] += 1.0;
    }
  }

  diag.order.resize(n);
  std::iota(diag.order.begin(), diag.order.end(), 0);
  std::sort(diag.order.begin(), diag.order.end(),
            [&](std::size_t a, std::size_t b) {
              return diag.rho[a] != diag.rho[b] ? diag.rho[a] > diag.rho[b]
                                                : a < b;
            });

  diag.delta.assign(n, 0.0);
  diag.parent.assign(n, -1);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = diag.order[r];
    if (r == 0) {
      for (std::size_t j = 0; j < n; ++j) {
        diag.delta[i] = std::max(diag.delta[i], dist[i * n + j]);
      }
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < r; ++s) {
      const double d = dist[i * n + diag.order[s]];
      if (d < best) {
        best = d;
        diag.parent[i] = static_cast<int>(diag.order[s]);
      }
    }
    diag.delta[i] = best;
  }
  return diag;
}

/// Density-peak clustering: peaks per params, every other point joining the
/// cluster of its nearest higher-density neighbor (walking the density
/// ordering downward). No point is noise. All points identical collapses to
/// one cluster.
inline ClusterAssignment dpc(const FeatureMatrix& points, const DpcParams& params) {
  const DpcDiagnostics diag = dpc_diagnostics(points, params);
  const std::size_t n = points.n_rows;

  ClusterAssignment out;
  if (diag.max_pairwise == 0.0) {
    out.labels.assign(n, 0);
    out.n_clusters = 1;
    return out;
  }

  std::vector<bool> is_peak(n, false);
  if (params.use_thresholds) {
    for (std::size_t i = 0; i < n; ++i) {
      is_peak[i] = diag.rho[i] >= params.rho_min && diag.delta[i] >= params.delta_min;
    }
  } else {
    std::vector<std::size_t> by_gamma(n);
    std::iota(by_gamma.begin(), by_gamma.end(), 0);
    std::sort(by_gamma.begin(), by_gamma.end(),
              [&](std::size_t a, std::size_t b) {
                const double ga = diag.rho[a] * diag.delta[a];
                const double gb = diag.rho[b] * diag.delta[b];
                return ga != gb ? ga > gb : a < b;
              });
    for (std::size_t i = 0; i < std::min(params.peaks, n); ++i) {
      is_peak[by_gamma[i]] = true;
    }
  }
  if (std::none_of(is_peak.begin(), is_peak.end(), [](bool b) { return b; })) {
    is_peak[diag.order[0]] = true;  // thresholds excluded everything
  }

  out.labels.assign(n, -1);
  int next_cluster = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = diag.order[r];
    if (is_peak[i]) {
      out.labels[i] = next_cluster++;
    } else {
      out.labels[i] = out.labels[static_cast<std::size_t>(diag.parent[i])];
    }
  }
  out.n_clusters = static_cast<std::size_t>(next_cluster);
  return out;
}

}  // namespace dualtier
