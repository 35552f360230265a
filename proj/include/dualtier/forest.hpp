#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dualtier/common.hpp"
#include "dualtier/matrix.hpp"

namespace dualtier {

/// Per-class probabilities; non-negative, summing to 1.
using ClassDistribution = std::vector<double>;

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t mtry = 0;             // 0: ceil(sqrt(n_features))
  std::size_t max_depth = 0;        // 0: unlimited
  std::size_t min_samples_leaf = 1;
  std::uint64_t seed = 0;
};

/// CART tree stored as a flat node array; leaves hold class-count
/// distributions over the forest's class list.
struct DecisionTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> counts;  // leaf only: per-class sample counts
  };
  std::vector<Node> nodes;

  const Node& leaf_for(std::span<const double> row) const {
    int idx = 0;
    while (nodes[static_cast<std::size_t>(idx)].feature >= 0) {
      const Node& n = nodes[static_cast<std::size_t>(idx)];
      idx = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                    : n.right;
    }
    return nodes[static_cast<std::size_t>(idx)];
  }
};

/// Random forest over class NAMES: labels are resolved by name so that class
/// ids may differ between training matrices across retraining rounds.
struct ForestModel {
  ForestParams params;
  std::vector<std::string> class_names;
  std::size_t n_features = 0;
  std::vector<DecisionTree> trees;

  int class_index(const std::string& name) const {
    for (std::size_t i = 0; i < class_names.size(); ++i) {
      if (class_names[i] == name) return static_cast<int>(i);
    }
    return -1;
  }
};

namespace forest_detail {

inline double gini(const std::vector<double>& counts, double total) {
  if (total <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (double c : counts) sum_sq += c * c;
  return 1.0 - sum_sq / (total * total);
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = std::numeric_limits<double>::infinity();
  bool valid() const { return feature >= 0; }
};

/// Best Gini split over the given feature subset; candidate thresholds are
/// midpoints between consecutive distinct sorted values. Ties keep the first
/// candidate found (feature order as given, thresholds ascending).
inline Split find_best_split(const FeatureMatrix& data,
                             const std::vector<int>& row_labels,
                             const std::vector<std::size_t>& rows,
                             const std::vector<int>& features,
                             std::size_t n_classes,
                             std::size_t min_samples_leaf) {
  Split best;
  const double total = static_cast<double>(rows.size());

  std::vector<std::pair<double, int>> column(rows.size());
  for (int feature : features) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      column[i] = {data.at(rows[i], static_cast<std::size_t>(feature)),
                   row_labels[rows[i]]};
    }
    std::sort(column.begin(), column.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (column.front().first == column.back().first) continue;  // constant

    std::vector<double> left_counts(n_classes, 0.0);
    std::vector<double> right_counts(n_classes, 0.0);
    for (const auto& [v, cls] : column) {
      right_counts[static_cast<std::size_t>(cls)] += 1.0;
    }

    double n_left = 0.0;
    for (std::size_t i = 0; i + 1 < column.size(); ++i) {
      const auto cls = static_cast<std::size_t>(column[i].second);
      left_counts[cls] += 1.0;
      right_counts[cls] -= 1.0;
      n_left += 1.0;
      if (column[i].first == column[i + 1].first) continue;
      const double n_right = total - n_left;
      if (n_left < static_cast<double>(min_samples_leaf) ||
          n_right < static_cast<double>(min_samples_leaf)) {
        continue;
      }
      const double impurity = (n_left * gini(left_counts, n_left) +
                               n_right * gini(right_counts, n_right)) /
                              total;
      if (impurity < best.impurity) {
        best.feature = feature;
        best.threshold = (column[i].first + column[i + 1].first) / 2.0;
        best.impurity = impurity;
      }
    }
  }
  return best;
}

struct TreeBuilder {
  const FeatureMatrix& data;
  const std::vector<int>& row_labels;  // per data row: forest class index
  const ForestParams& params;
  std::size_t n_classes;
  std::size_t mtry;
  Rng& rng;
  DecisionTree& tree;

  int build(std::vector<std::size_t>& rows, std::size_t depth) {
    std::vector<double> counts(n_classes, 0.0);
    for (std::size_t r : rows) {
      counts[static_cast<std::size_t>(row_labels[r])] += 1.0;
    }
    const bool pure =
        std::count_if(counts.begin(), counts.end(),
                      [](double c) { return c > 0.0; }) <= 1;
    if (pure || rows.size() < 2 * params.min_samples_leaf ||
        (params.max_depth > 0 && depth >= params.max_depth)) {
      return make_leaf(std::move(counts));
    }

    // sample mtry distinct features; fall back to scanning all of them when
    // the sampled subset is constant on this node
    std::vector<int> all_features(data.n_cols);
    for (std::size_t c = 0; c < data.n_cols; ++c) {
      all_features[c] = static_cast<int>(c);
    }
    std::vector<int> sampled = all_features;
    for (std::size_t i = 0; i < mtry && i < sampled.size(); ++i) {
      std::swap(sampled[i], sampled[i + rng.index(sampled.size() - i)]);
    }
    sampled.resize(std::min(mtry, sampled.size()));

    Split split = find_best_split(data, row_labels, rows, sampled, n_classes,
                                  params.min_samples_leaf);
    if (!split.valid() && mtry < data.n_cols) {
      split = find_best_split(data, row_labels, rows, all_features, n_classes,
                              params.min_samples_leaf);
    }
    if (!split.valid()) return make_leaf(std::move(counts));

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
      if (data.at(r, static_cast<std::size_t>(split.feature)) <=
          split.threshold) {
        left_rows.push_back(r);
      } else {
        right_rows.push_back(r);
      }
    }

    const int node_idx = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({split.feature, split.threshold, -1, -1, {}});
    const int left = build(left_rows, depth + 1);
    const int right = build(right_rows, depth + 1);
    tree.nodes[static_cast<std::size_t>(node_idx)].left = left;
    tree.nodes[static_cast<std::size_t>(node_idx)].right = right;
    return node_idx;
  }

  int make_leaf(std::vector<double> counts) {
    tree.nodes.push_back({-1, 0.0, -1, -1, std::move(counts)});
    return static_cast<int>(tree.nodes.size() - 1);
  }
};

}  // namespace forest_detail

/// Fit a random forest: n_trees CART trees, each on a bootstrap sample of the
/// same cardinality as the input, Gini splits over mtry sampled features.
/// Class names are collected in first-appearance order; pass `base_classes`
/// to pin an existing ordering (new names are appended).
inline ForestModel fit_forest(const FeatureMatrix& train, ForestParams params,
                              const std::vector<std::string>& base_classes = {}) {
  if (train.n_rows == 0) throw DataError("fit_forest: empty training set");
  if (!train.has_labels()) throw DataError("fit_forest: training set has no labels");

  ForestModel model;
  model.params = params;
  model.n_features = train.n_cols;
  model.class_names = base_classes;
  for (std::size_t i = 0; i < train.n_rows; ++i) {
    const std::string& name = train.label_name(i);
    if (model.class_index(name) < 0) model.class_names.push_back(name);
  }

  std::vector<int> row_labels(train.n_rows);
  for (std::size_t i = 0; i < train.n_rows; ++i) {
    row_labels[i] = model.class_index(train.label_name(i));
  }

  const std::size_t mtry =
      params.mtry > 0 ? std::min(params.mtry, train.n_cols)
                      : static_cast<std::size_t>(std::ceil(
                            std::sqrt(static_cast<double>(train.n_cols))));

  model.trees.resize(params.n_trees);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    Rng rng(Rng::derive(params.seed, t));
    std::vector<std::size_t> bootstrap(train.n_rows);
    for (auto& r : bootstrap) r = rng.index(train.n_rows);
    forest_detail::TreeBuilder builder{
        train,      row_labels, params, model.class_names.size(),
        mtry,       rng,        model.trees[t]};
    builder.build(bootstrap, 0);
  }
  return model;
}

/// Mean of the per-tree leaf distributions; sums to 1.
inline ClassDistribution predict_proba(const ForestModel& model,
                                       std::span<const double> row) {
  if (row.size() != model.n_features) {
    throw DataError("predict_proba: row has " + std::to_string(row.size()) +
                    " features, model expects " +
                    std::to_string(model.n_features));
  }
  ClassDistribution probs(model.class_names.size(), 0.0);
  for (const auto& tree : model.trees) {
    const auto& leaf = tree.leaf_for(row);
    double total = 0.0;
    for (double c : leaf.counts) total += c;
    for (std::size_t i = 0; i < leaf.counts.size(); ++i) {
      probs[i] += leaf.counts[i] / total;
    }
  }
  for (auto& p : probs) p /= static_cast<double>(model.trees.size());
  return probs;
}

/// Argmax of predict_proba; exact ties go to the lowest class index.
inline const std::string& predict(const ForestModel& model,
                                  std::span<const double> row) {
  const auto probs = predict_proba(model, row);
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return model.class_names[best];
}

/// Full refit on the extended training set. The class list keeps the old
/// ordering and appends new classes in first-appearance order, so coverage is
/// monotone across retraining rounds.
inline ForestModel extend_classes(const ForestModel& model,
                                  const FeatureMatrix& new_train) {
  if (new_train.n_rows == 0) throw DataError("extend_classes: empty input");
  return fit_forest(new_train, model.params, model.class_names);
}

}  // namespace dualtier
