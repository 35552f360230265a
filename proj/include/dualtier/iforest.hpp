#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "dualtier/common.hpp"
#include "dualtier/matrix.hpp"

namespace dualtier {

namespace iforest_detail {

constexpr double kEulerMascheroni = 0.5772156649015329;

/// Average unsuccessful-search path length in a BST of n points; the
/// normalizer for isolation depths. c(1) = 0 and c(2) = 1 by convention.
inline double average_path_length(std::size_t n) {
  if (n <= 1) return 0.0;
  if (n == 2) return 1.0;
  const double nd = static_cast<double>(n);
  return 2.0 * (std::log(nd - 1.0) + kEulerMascheroni) - 2.0 * (nd - 1.0) / nd;
}

}  // namespace iforest_detail

/// Isolation tree stored as a flat node array. Leaves keep the sample count
/// so path lengths can be extended by c(size).
struct IsolationTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double split = 0.0;
    int left = -1;
    int right = -1;
    std::uint32_t size = 0;
  };
  std::vector<Node> nodes;

  double path_length(std::span<const double> row) const {
    double depth = 0.0;
    int idx = 0;
    while (nodes[static_cast<std::size_t>(idx)].feature >= 0) {
      const Node& n = nodes[static_cast<std::size_t>(idx)];
      idx = row[static_cast<std::size_t>(n.feature)] < n.split ? n.left : n.right;
      depth += 1.0;
    }
    return depth +
           iforest_detail::average_path_length(
               nodes[static_cast<std::size_t>(idx)].size);
  }
};

/// Forest of isolation trees fit on random subsamples with random
/// axis-parallel splits. The anomaly score 2^(-E[h]/c(psi)) grows toward 1
/// for isolated points; model scores are negated so larger = more normal.
struct IForestModel {
  std::size_t n_features = 0;
  std::size_t subsample = 0;  // psi actually used (may be lowered to n_rows)
  std::vector<IsolationTree> trees;

  double anomaly_score(std::span<const double> row) const {
    double total = 0.0;
    for (const auto& tree : trees) total += tree.path_length(row);
    const double mean_path = total / static_cast<double>(trees.size());
    const double c = iforest_detail::average_path_length(subsample);
    if (c <= 0.0) return 1.0;  // psi <= 1: every tree is a single leaf
    return std::pow(2.0, -mean_path / c);
  }

  /// Normality score, higher = more normal.
  double score(std::span<const double> row) const { return -anomaly_score(row); }
};

namespace iforest_detail {

struct Builder {
  const FeatureMatrix& data;
  std::size_t height_limit;
  Rng& rng;
  IsolationTree& tree;

  int build(std::vector<std::size_t>& rows, std::size_t begin, std::size_t end,
            std::size_t depth) {
    const std::size_t count = end - begin;
    if (depth >= height_limit || count <= 1) return make_leaf(count);

    // candidate features: those not constant over this node's rows
    std::vector<int> candidates;
    std::vector<double> lo(data.n_cols), hi(data.n_cols);
    for (std::size_t c = 0; c < data.n_cols; ++c) {
      double mn = data.at(rows[begin], c), mx = mn;
      for (std::size_t i = begin + 1; i < end; ++i) {
        const double v = data.at(rows[i], c);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
      lo[c] = mn;
      hi[c] = mx;
      if (mn < mx) candidates.push_back(static_cast<int>(c));
    }
    if (candidates.empty()) return make_leaf(count);  // all duplicates

    const int feature = candidates[rng.index(candidates.size())];
    const double split =
        rng.real(lo[static_cast<std::size_t>(feature)],
                 hi[static_cast<std::size_t>(feature)]);

    // partition rows in place; split < hi guarantees both sides non-empty
    std::size_t mid = begin;
    for (std::size_t i = begin; i < end; ++i) {
      if (data.at(rows[i], static_cast<std::size_t>(feature)) < split) {
        std::swap(rows[i], rows[mid]);
        ++mid;
      }
    }
    if (mid == begin || mid == end) return make_leaf(count);

    const int node_idx = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({feature, split, -1, -1, 0});
    const int left = build(rows, begin, mid, depth + 1);
    const int right = build(rows, mid, end, depth + 1);
    tree.nodes[static_cast<std::size_t>(node_idx)].left = left;
    tree.nodes[static_cast<std::size_t>(node_idx)].right = right;
    return node_idx;
  }

  int make_leaf(std::size_t count) {
    tree.nodes.push_back(
        {-1, 0.0, -1, -1, static_cast<std::uint32_t>(count)});
    return static_cast<int>(tree.nodes.size() - 1);
  }
};

}  // namespace iforest_detail

inline IForestModel fit_iforest_model(const FeatureMatrix& train,
                                      std::size_t n_trees, std::size_t subsample,
                                      std::uint64_t seed) {
  if (train.n_rows == 0) throw DataError("fit_iforest: empty training set");
  IForestModel model;
  model.n_features = train.n_cols;
  model.subsample = std::min(subsample, train.n_rows);

  const std::size_t psi = model.subsample;
  const std::size_t height_limit = psi <= 2
      ? 1
      : static_cast<std::size_t>(
            std::ceil(std::log2(static_cast<double>(psi))));

  std::vector<std::size_t> all(train.n_rows);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  model.trees.resize(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) {
    Rng rng(Rng::derive(seed, t));
    // partial Fisher-Yates: first psi entries become the subsample
    std::vector<std::size_t> rows = all;
    for (std::size_t i = 0; i < psi; ++i) {
      std::swap(rows[i], rows[i + rng.index(rows.size() - i)]);
    }
    rows.resize(psi);
    iforest_detail::Builder builder{train, height_limit, rng, model.trees[t]};
    builder.build(rows, 0, psi, 0);
  }
  return model;
}

}  // namespace dualtier
