#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dualtier/common.hpp"

namespace dualtier {

/// k disjoint index lists partitioning [0, n_rows), class-balanced.
struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::vector<std::size_t>> folds;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;  // classes with fewer than k members

  /// Indices of every fold except `test_fold`, ascending.
  std::vector<std::size_t> train_indices(std::size_t test_fold) const {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      if (f == test_fold) continue;
      out.insert(out.end(), folds[f].begin(), folds[f].end());
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

/// Stratified k-fold split: per class, indices are shuffled and dealt
/// round-robin, so each fold's class count is within one of n_class/k.
/// Classes with fewer than k members are dealt the same way and flagged.
/// Deterministic for a fixed seed.
inline FoldPlan stratified_kfold(const std::vector<int>& labels, std::size_t k,
                                 std::uint64_t seed) {
  if (k < 2) throw DataError("stratified_kfold: k must be >= 2");
  if (k > labels.size()) {
    throw DataError("stratified_kfold: k=" + std::to_string(k) + " exceeds " +
                    std::to_string(labels.size()) + " rows");
  }

  std::map<int, std::vector<std::size_t>> by_class;  // ordered for determinism
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.assign(k, {});

  Rng rng(seed);
  std::size_t start = 0;  // rotates so small classes spread across folds
  for (auto& [cls, indices] : by_class) {
    if (indices.size() < k) {
      plan.warnings.push_back("class id " + std::to_string(cls) + " has only " +
                              std::to_string(indices.size()) + " members for " +
                              std::to_string(k) + " folds");
    }
    rng.shuffle(indices);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      plan.folds[(start + i) % k].push_back(indices[i]);
    }
    start = (start + indices.size()) % k;
  }
  for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
  return plan;
}

}  // namespace dualtier
