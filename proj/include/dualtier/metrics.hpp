#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "dualtier/common.hpp"

namespace dualtier {

/// Square count matrix, rows = truth, columns = prediction.
struct ConfusionMatrix {
  std::vector<std::string> class_names;
  std::vector<std::int64_t> counts;  // row-major

  std::int64_t at(std::size_t truth, std::size_t pred) const {
    return counts[truth * class_names.size() + pred];
  }
  std::int64_t& at(std::size_t truth, std::size_t pred) {
    return counts[truth * class_names.size() + pred];
  }

  std::int64_t total() const {
    std::int64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }

  std::size_t index_of(const std::string& name) const {
    auto it = std::find(class_names.begin(), class_names.end(), name);
    if (it == class_names.end()) {
      throw DataError("confusion matrix has no class '" + name + "'");
    }
    return static_cast<std::size_t>(it - class_names.begin());
  }
};

/// Count co-occurrences over an explicit class list (order preserved).
inline ConfusionMatrix confusion(const std::vector<std::string>& y_true,
                                 const std::vector<std::string>& y_pred,
                                 const std::vector<std::string>& class_names) {
  if (y_true.size() != y_pred.size()) {
    throw DataError("confusion: " + std::to_string(y_true.size()) +
                    " truths vs " + std::to_string(y_pred.size()) +
                    " predictions");
  }
  ConfusionMatrix m;
  m.class_names = class_names;
  m.counts.assign(class_names.size() * class_names.size(), 0);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ++m.at(m.index_of(y_true[i]), m.index_of(y_pred[i]));
  }
  return m;
}

/// Class list defaults to the sorted union of observed labels.
inline ConfusionMatrix confusion(const std::vector<std::string>& y_true,
                                 const std::vector<std::string>& y_pred) {
  std::set<std::string> names(y_true.begin(), y_true.end());
  names.insert(y_pred.begin(), y_pred.end());
  return confusion(y_true, y_pred,
                   std::vector<std::string>(names.begin(), names.end()));
}

/// Metrics on the percent scale (x100). Zero denominators yield 0.
struct MetricsReport {
  struct PerClass {
    std::string name;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t support = 0;
  };

  double accuracy = 0.0;
  std::vector<PerClass> per_class;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;

  const PerClass& for_class(const std::string& name) const {
    for (const auto& pc : per_class) {
      if (pc.name == name) return pc;
    }
    throw DataError("metrics report has no class '" + name + "'");
  }
};

namespace metrics_detail {

inline double safe_div(double num, double den) {
  return den == 0.0 ? 0.0 : num / den;
}

inline MetricsReport::PerClass one_vs_rest(const ConfusionMatrix& m,
                                           std::size_t cls) {
  const std::size_t k = m.class_names.size();
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t j = 0; j < k; ++j) {
    if (j == cls) {
      tp = static_cast<double>(m.at(cls, cls));
    } else {
      fn += static_cast<double>(m.at(cls, j));
      fp += static_cast<double>(m.at(j, cls));
    }
  }
  MetricsReport::PerClass pc;
  pc.name = m.class_names[cls];
  pc.support = static_cast<std::int64_t>(tp + fn);
  pc.precision = safe_div(tp, tp + fp) * 100.0;
  pc.recall = safe_div(tp, tp + fn) * 100.0;
  pc.f1 = safe_div(2.0 * pc.precision * pc.recall, pc.precision + pc.recall);
  return pc;
}

}  // namespace metrics_detail

/// Per-class one-vs-rest precision/recall/F1, support-weighted and macro F1,
/// overall accuracy = trace/total x100.
inline MetricsReport multiclass_metrics(const ConfusionMatrix& m) {
  const std::size_t k = m.class_names.size();
  if (k == 0) throw DataError("multiclass_metrics: empty matrix");

  MetricsReport r;
  double trace = 0.0;
  double weighted = 0.0, macro = 0.0, support_total = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    trace += static_cast<double>(m.at(c, c));
    auto pc = metrics_detail::one_vs_rest(m, c);
    weighted += static_cast<double>(pc.support) * pc.f1;
    macro += pc.f1;
    support_total += static_cast<double>(pc.support);
    r.per_class.push_back(std::move(pc));
  }
  r.accuracy = metrics_detail::safe_div(trace, static_cast<double>(m.total())) * 100.0;
  r.macro_f1 = macro / static_cast<double>(k);
  r.weighted_f1 = metrics_detail::safe_div(weighted, support_total);
  return r;
}

/// Two-class metrics computed straight from the TP/TN/FP/FN formulas
/// (Accuracy = (TP+TN)/(TP+TN+FP+FN) x100 and companions). An independent
/// route from multiclass_metrics; the two must agree on 2-class matrices.
inline MetricsReport binary_metrics(const ConfusionMatrix& m,
                                    const std::string& positive) {
  if (m.class_names.size() != 2) {
    throw DataError("binary_metrics: matrix has " +
                    std::to_string(m.class_names.size()) + " classes, need 2");
  }
  const std::size_t pos = m.index_of(positive);
  const std::size_t neg = 1 - pos;
  const double tp = static_cast<double>(m.at(pos, pos));
  const double tn = static_cast<double>(m.at(neg, neg));
  const double fp = static_cast<double>(m.at(neg, pos));
  const double fn = static_cast<double>(m.at(pos, neg));
  using metrics_detail::safe_div;

  MetricsReport r;
  r.accuracy = safe_div(tp + tn, tp + tn + fp + fn) * 100.0;
  MetricsReport::PerClass p;
  p.name = positive;
  p.support = static_cast<std::int64_t>(tp + fn);
  p.precision = safe_div(tp, tp + fp) * 100.0;
  p.recall = safe_div(tp, tp + fn) * 100.0;
  p.f1 = safe_div(2.0 * p.precision * p.recall, p.precision + p.recall);

  MetricsReport::PerClass q;  // the negative class, roles swapped
  q.name = m.class_names[neg];
  q.support = static_cast<std::int64_t>(tn + fp);
  q.precision = safe_div(tn, tn + fn) * 100.0;
  q.recall = safe_div(tn, tn + fp) * 100.0;
  q.f1 = safe_div(2.0 * q.precision * q.recall, q.precision + q.recall);

  // keep matrix class order
  if (pos == 0) {
    r.per_class = {p, q};
  } else {
    r.per_class = {q, p};
  }
  r.macro_f1 = (p.f1 + q.f1) / 2.0;
  r.weighted_f1 = safe_div(static_cast<double>(p.support) * p.f1 +
                               static_cast<double>(q.support) * q.f1,
                           static_cast<double>(p.support + q.support));
  return r;
}

/// Individual attack-category accuracy. `formula_value` applies the printed
/// formula ACC_x = TP_x / (TP_x + TN_x + FP_x + FN_x) verbatim; its
/// denominator is the whole batch, which is neither conventional accuracy nor
/// recall, so both conventional one-vs-rest readings are reported alongside
/// rather than silently substituted.
struct PerAttackAccuracy {
  double formula_value = 0.0;
  double conventional_recall = 0.0;    // TP_x / (TP_x + FN_x)
  double conventional_accuracy = 0.0;  // (TP_x + TN_x) / total
};

inline PerAttackAccuracy per_attack_accuracy(
    const std::vector<std::string>& y_true,
    const std::vector<std::string>& y_pred, const std::string& attack) {
  if (y_true.size() != y_pred.size() || y_true.empty()) {
    throw DataError("per_attack_accuracy: bad label vectors");
  }
  double tp = 0, tn = 0, truth_count = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool is_attack = y_true[i] == attack;
    const bool predicted = y_pred[i] == attack;
    if (is_attack) {
      ++truth_count;
      if (predicted) ++tp;
    } else if (!predicted) {
      ++tn;
    }
  }
  PerAttackAccuracy out;
  const double total = static_cast<double>(y_true.size());
  out.formula_value = tp / total * 100.0;
  out.conventional_recall = metrics_detail::safe_div(tp, truth_count) * 100.0;
  out.conventional_accuracy = (tp + tn) / total * 100.0;
  return out;
}

/// Overload validating the attack name against an explicit class set.
inline PerAttackAccuracy per_attack_accuracy(
    const std::vector<std::string>& y_true,
    const std::vector<std::string>& y_pred, const std::string& attack,
    const std::vector<std::string>& class_names) {
  if (std::find(class_names.begin(), class_names.end(), attack) ==
      class_names.end()) {
    throw DataError("per_attack_accuracy: unknown class '" + attack + "'");
  }
  return per_attack_accuracy(y_true, y_pred, attack);
}

}  // namespace dualtier
