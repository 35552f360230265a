#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dualtier/common.hpp"
#include "dualtier/iforest.hpp"
#include "dualtier/lof.hpp"
#include "dualtier/matrix.hpp"

namespace dualtier {

enum class DetectorKind { iforest, lof, external };

inline std::string to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::iforest: return "iforest";
    case DetectorKind::lof: return "lof";
    case DetectorKind::external: return "external";
  }
  return "?";
}

inline DetectorKind detector_kind_from(const std::string& name) {
  if (name == "iforest") return DetectorKind::iforest;
  if (name == "lof") return DetectorKind::lof;
  if (name == "external") return DetectorKind::external;
  throw ConfigError("unknown detector kind '" + name + "'");
}

/// One-class detector selection and hyperparameters.
struct DetectorSpec {
  DetectorKind kind = DetectorKind::iforest;
  std::size_t n_trees = 100;
  std::size_t subsample_size = 256;
  std::size_t k_neighbors = 20;
  std::uint64_t seed = 0;
  std::string external_name;  // registry key when kind == external

  void validate() const {
    if (n_trees < 1) throw ConfigError("detector: n_trees must be >= 1");
    if (subsample_size < 2) throw ConfigError("detector: subsample_size must be >= 2");
    if (k_neighbors < 1) throw ConfigError("detector: k_neighbors must be >= 1");
  }
};

/// The decision rule's cut on normality scores: th = mean - 3 * std over the
/// training scores. A test instance scoring below th is treated as outside
/// the trained class.
struct ScoreThreshold {
  double mean = 0.0;
  double std_dev = 0.0;
  double th = 0.0;
};

/// Population mean/std of the training scores and the 3-sigma threshold.
inline ScoreThreshold fit_threshold(const std::vector<double>& training_scores) {
  if (training_scores.empty()) {
    throw DataError("fit_threshold: empty score list");
  }
  const double n = static_cast<double>(training_scores.size());
  double sum = 0.0;
  for (double s : training_scores) sum += s;
  const double mean = sum / n;
  double var = 0.0;
  for (double s : training_scores) var += (s - mean) * (s - mean);
  const double std_dev = std::sqrt(var / n);
  return {mean, std_dev, mean - 3.0 * std_dev};
}

/// Plug-in contract for detectors whose internals live outside this library
/// (e.g. usfAD): fit on one matrix, emit real scores, higher = more normal.
class ExternalScorer {
 public:
  virtual ~ExternalScorer() = default;
  virtual double score(std::span<const double> row) const = 0;
};

using ExternalFitter = std::function<std::shared_ptr<const ExternalScorer>(
    const FeatureMatrix& train, const DetectorSpec& spec)>;

inline std::map<std::string, ExternalFitter>& external_detector_registry() {
  static std::map<std::string, ExternalFitter> registry;
  return registry;
}

inline void register_external_detector(const std::string& name,
                                       ExternalFitter fitter) {
  external_detector_registry()[name] = std::move(fitter);
}

struct ExternalModel {
  std::string name;
  std::shared_ptr<const ExternalScorer> scorer;
};

enum class Classification { Inlier, Outlier };

/// A fitted one-class model: detector structure plus the fitted threshold.
/// Immutable after fit; scoring is pure and safe to share across threads.
struct OccModel {
  DetectorSpec spec;
  std::size_t n_features = 0;
  ScoreThreshold threshold;
  std::variant<IForestModel, LofModel, ExternalModel> impl;

  /// Normality score of a row (higher = more normal, matching the rule
  /// "score below threshold means outside the class").
  double score(std::span<const double> row) const {
    if (row.size() != n_features) {
      throw DataError("score: row has " + std::to_string(row.size()) +
                      " features, model expects " + std::to_string(n_features));
    }
    if (const auto* f = std::get_if<IForestModel>(&impl)) return f->score(row);
    if (const auto* l = std::get_if<LofModel>(&impl)) return l->score(row);
    return std::get<ExternalModel>(impl).scorer->score(row);
  }

  /// Outlier iff score < th; a tie counts as Inlier.
  Classification classify(std::span<const double> row) const {
    return score(row) < threshold.th ? Classification::Outlier
                                     : Classification::Inlier;
  }
};

/// Fit an isolation forest and its score threshold on one class of data.
inline OccModel fit_iforest(const FeatureMatrix& train, const DetectorSpec& spec) {
  spec.validate();
  OccModel model;
  model.spec = spec;
  model.n_features = train.n_cols;
  model.impl = fit_iforest_model(train, spec.n_trees, spec.subsample_size,
                                 spec.seed);
  const auto& forest = std::get<IForestModel>(model.impl);
  std::vector<double> scores(train.n_rows);
  for (std::size_t i = 0; i < train.n_rows; ++i) {
    scores[i] = forest.score(train.row(i));
  }
  model.threshold = fit_threshold(scores);
  return model;
}

/// Fit a LOF model and its threshold; training scores are leave-self-out.
inline OccModel fit_lof(const FeatureMatrix& train, const DetectorSpec& spec) {
  spec.validate();
  OccModel model;
  model.spec = spec;
  model.n_features = train.n_cols;
  model.impl = fit_lof_model(train, spec.k_neighbors);
  const auto& lof = std::get<LofModel>(model.impl);
  std::vector<double> scores(train.n_rows);
  for (std::size_t i = 0; i < train.n_rows; ++i) scores[i] = lof.train_score(i);
  model.threshold = fit_threshold(scores);
  return model;
}

inline OccModel fit_external(const FeatureMatrix& train, const DetectorSpec& spec) {
  auto it = external_detector_registry().find(spec.external_name);
  if (it == external_detector_registry().end()) {
    throw ConfigError("external detector '" + spec.external_name +
                      "' is not registered");
  }
  OccModel model;
  model.spec = spec;
  model.n_features = train.n_cols;
  model.impl = ExternalModel{spec.external_name, it->second(train, spec)};
  const auto& ext = std::get<ExternalModel>(model.impl);
  std::vector<double> scores(train.n_rows);
  for (std::size_t i = 0; i < train.n_rows; ++i) {
    scores[i] = ext.scorer->score(train.row(i));
  }
  model.threshold = fit_threshold(scores);
  return model;
}

inline OccModel fit_detector(const FeatureMatrix& train, const DetectorSpec& spec) {
  switch (spec.kind) {
    case DetectorKind::iforest: return fit_iforest(train, spec);
    case DetectorKind::lof: return fit_lof(train, spec);
    case DetectorKind::external: return fit_external(train, spec);
  }
  throw ConfigError("fit_detector: bad kind");
}

}  // namespace dualtier
