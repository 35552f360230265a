#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "dualtier/common.hpp"

namespace dualtier {

/// Per-row cluster labels: ids are contiguous from 0, noise is -1.
struct ClusterAssignment {
  std::vector<int> labels;
  std::size_t n_clusters = 0;

  std::vector<std::size_t> members_of(int cluster) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cluster) out.push_back(i);
    }
    return out;
  }

  std::vector<std::size_t> cluster_sizes() const {
    std::vector<std::size_t> sizes(n_clusters, 0);
    for (int l : labels) {
      if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
    }
    return sizes;
  }
};

/// Cluster with the most members; ties go to the lowest id. Noise is never a
/// candidate. Errors when everything is noise.
inline std::pair<int, std::vector<std::size_t>> largest_cluster(
    const ClusterAssignment& assignment) {
  if (assignment.n_clusters == 0) {
    throw DataError("largest_cluster: no clusters (all noise)");
  }
  const auto sizes = assignment.cluster_sizes();
  std::size_t best = 0;
  for (std::size_t c = 1; c < sizes.size(); ++c) {
    if (sizes[c] > sizes[best]) best = c;
  }
  return {static_cast<int>(best), assignment.members_of(static_cast<int>(best))};
}

/// Purity scores of the largest cluster. With dominant-class member count d,
/// cluster size n and the dominant class's ground-truth total t_n in the
/// clustered batch: PSL1 = d/n (concentration), PSL2 = d/t_n (coverage),
/// PSLC = harmonic mean of the two.
struct ClusterQuality {
  std::string dominant_class;
  std::size_t d = 0;
  std::size_t n = 0;
  std::size_t t_n = 0;
  double psl1 = 0.0;
  double psl2 = 0.0;
  double pslc = 0.0;

  /// Quality from already-computed purity/coverage scores.
  static ClusterQuality from_scores(double psl1, double psl2) {
    ClusterQuality q;
    q.psl1 = psl1;
    q.psl2 = psl2;
    q.pslc = psl1 + psl2 == 0.0 ? 0.0 : 2.0 * psl1 * psl2 / (psl1 + psl2);
    return q;
  }
};

/// Score the largest cluster against ground truth. `member_truth` holds the
/// true class names of the cluster's members; `batch_truth` those of the whole
/// clustered batch. The dominant class is the mode of member_truth, ties
/// broken by lexicographically smallest name.
inline ClusterQuality cluster_quality(
    const std::vector<std::string>& member_truth,
    const std::vector<std::string>& batch_truth) {
  if (member_truth.empty()) throw DataError("cluster_quality: empty cluster");

  std::map<std::string, std::size_t> counts;  // ordered: ties resolve lexicographically
  for (const auto& name : member_truth) ++counts[name];
  auto dominant = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > dominant->second) dominant = it;
  }

  ClusterQuality q;
  q.dominant_class = dominant->first;
  q.d = dominant->second;
  q.n = member_truth.size();
  q.t_n = static_cast<std::size_t>(
      std::count(batch_truth.begin(), batch_truth.end(), q.dominant_class));
  if (q.d > q.t_n) {
    throw DataError("cluster_quality: cluster members are not a subset of the batch");
  }
  q.psl1 = static_cast<double>(q.d) / static_cast<double>(q.n);
  q.psl2 = static_cast<double>(q.d) / static_cast<double>(q.t_n);
  q.pslc = ClusterQuality::from_scores(q.psl1, q.psl2).pslc;
  return q;
}

}  // namespace dualtier
