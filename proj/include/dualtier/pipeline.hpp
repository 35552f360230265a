#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dualtier/clusters.hpp"
#include "dualtier/dbscan.hpp"
#include "dualtier/detector.hpp"
#include "dualtier/dpc.hpp"
#include "dualtier/forest.hpp"
#include "dualtier/matrix.hpp"
#include "dualtier/scenario.hpp"

namespace dualtier {

/// How promoted clusters get their class label: the simulation oracle reads
/// ground truth; synthetic naming stands in for the expert-review queue of a
/// deployment.
enum class LabelingMode { ground_truth_oracle, synthetic_new_class };

enum class ClusterAlgorithm { dbscan, dpc };

struct ClusteringConfig {
  ClusterAlgorithm algorithm = ClusterAlgorithm::dbscan;
  DbscanParams dbscan_params;
  DpcParams dpc_params;
};

struct PipelineConfig {
  DetectorSpec tier1_spec;
  DetectorSpec tier2_spec;
  ForestParams forest;
  ClusteringConfig clustering;
  std::size_t bucket_capacity = 1000;  // B
  std::size_t max_rounds = 16;
  LabelingMode labeling = LabelingMode::ground_truth_oracle;
  std::string normal_class = "normal";
  std::uint64_t seed = 0;

  void validate() const {
    tier1_spec.validate();
    tier2_spec.validate();
    if (bucket_capacity < clustering.dbscan_params.min_pts) {
      throw ConfigError("bucket capacity must be >= dbscan min_pts");
    }
  }
};

/// Staging store for instances judged UnknownAttack. True labels ride along
/// for the simulation oracle only.
struct UnknownBucket {
  FeatureMatrix rows;  // features only
  std::vector<std::string> true_labels;
  std::size_t capacity = 1000;

  std::size_t size() const { return rows.n_rows; }
  bool full() const { return size() >= capacity; }
};

struct Verdict {
  enum class Kind { Normal, KnownAttack, UnknownAttack };
  Kind kind = Kind::Normal;
  std::string family;        // KnownAttack only
  double probability = 0.0;  // KnownAttack only
};

/// One successful retraining round.
struct RetrainEvent {
  std::size_t round = 0;  // equals the version it produced
  ClusterQuality quality;
  std::string promoted_class;
  std::size_t promoted_count = 0;
  std::size_t new_version = 0;
  // Position in the test stream when the round ran; the boundaries split the
  // stream into the per-round segments. 0 outside a simulation.
  std::size_t stream_position = 0;
};

/// Versioned model triple plus the unknown bucket. States are immutable in
/// normal operation: inference is read-only, and retraining builds a new
/// state, so in-flight readers can finish against the old version.
struct PipelineState {
  std::size_t version = 0;
  OccModel tier1;
  OccModel tier2;
  ForestModel family_model;
  std::vector<std::string> known_classes;
  FeatureMatrix tier2_train;   // known-attack features
  FeatureMatrix family_train;  // same rows, with family labels
  UnknownBucket bucket;

  // Fit-time audit trail: indices (into the matrix given to train_initial)
  // of every row baked into a version-0 model. Supports leakage audits.
  std::vector<std::size_t> tier1_fit_rows;
  std::vector<std::size_t> tier2_fit_rows;

  bool is_known(const std::string& cls) const {
    return std::find(known_classes.begin(), known_classes.end(), cls) !=
           known_classes.end();
  }
};

namespace pipeline_detail {

// Stable sub-stream tags for deriving model seeds from the pipeline seed.
constexpr std::uint64_t kTier1Stream = 0x1001;
constexpr std::uint64_t kTier2Stream = 0x2001;
constexpr std::uint64_t kForestStream = 0x3001;

inline ClusterAssignment run_clustering(const FeatureMatrix& points,
                                        const ClusteringConfig& cfg) {
  if (cfg.algorithm == ClusterAlgorithm::dbscan) {
    return dbscan(points, cfg.dbscan_params);
  }
  return dpc(points, cfg.dpc_params);
}

}  // namespace pipeline_detail

/// Fit the version-0 state: tier-1 on normal rows only, tier-2 and the family
/// classifier on known-attack rows only. Rows of the scenario's unknown
/// classes are excluded from every fitted structure.
inline PipelineState train_initial(const FeatureMatrix& train,
                                   const ScenarioSpec& scenario,
                                   const PipelineConfig& config) {
  config.validate();
  if (!train.has_labels()) throw DataError("train_initial: unlabeled training data");

  for (const auto& cls : scenario.known_classes) {
    if (train.class_id(cls) < 0) {
      throw DataError("train_initial: scenario references absent class '" + cls + "'");
    }
  }
  for (const auto& cls : scenario.unknown_classes) {
    if (train.class_id(cls) < 0) {
      throw DataError("train_initial: scenario references absent class '" + cls + "'");
    }
  }
  if (scenario.known_classes.empty()) {
    throw DataError("train_initial: scenario has no known classes");
  }

  std::vector<std::size_t> normal_rows, known_rows;
  for (std::size_t i = 0; i < train.n_rows; ++i) {
    const std::string& cls = train.label_name(i);
    if (cls == config.normal_class) {
      normal_rows.push_back(i);
    } else if (scenario.is_known(cls)) {
      known_rows.push_back(i);
    }
    // unknown-class rows take no part in fitting
  }
  if (normal_rows.empty()) throw DataError("train_initial: no normal rows");
  if (known_rows.empty()) throw DataError("train_initial: no known-attack rows");

  PipelineState state;
  state.version = 0;
  state.known_classes.assign(scenario.known_classes.begin(),
                             scenario.known_classes.end());
  state.tier1_fit_rows = normal_rows;
  state.tier2_fit_rows = known_rows;

  FeatureMatrix normal_train = select_rows(train, normal_rows);
  normal_train.labels.clear();

  state.family_train = select_rows(train, known_rows);
  state.tier2_train = state.family_train;
  state.tier2_train.labels.clear();

  DetectorSpec t1 = config.tier1_spec;
  t1.seed = Rng::derive(config.seed, pipeline_detail::kTier1Stream);
  state.tier1 = fit_detector(normal_train, t1);

  DetectorSpec t2 = config.tier2_spec;
  t2.seed = Rng::derive(config.seed, pipeline_detail::kTier2Stream);
  state.tier2 = fit_detector(state.tier2_train, t2);

  ForestParams fp = config.forest;
  fp.seed = Rng::derive(config.seed, pipeline_detail::kForestStream);
  state.family_model = fit_forest(state.family_train, fp);

  state.bucket.capacity = config.bucket_capacity;
  state.bucket.rows.n_cols = train.n_cols;
  return state;
}

/// The dual-tier decision flow: tier-1 inlier -> Normal (tier-2 is never
/// consulted); tier-1 outlier and tier-2 inlier -> KnownAttack with the
/// family classifier's verdict; both outliers -> UnknownAttack.
inline Verdict infer(const PipelineState& state, std::span<const double> row) {
  if (state.tier1.classify(row) == Classification::Inlier) {
    return {Verdict::Kind::Normal, "", 0.0};
  }
  if (state.tier2.classify(row) == Classification::Inlier) {
    const auto probs = predict_proba(state.family_model, row);
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
      if (probs[i] > probs[best]) best = i;
    }
    return {Verdict::Kind::KnownAttack, state.family_model.class_names[best],
            probs[best]};
  }
  return {Verdict::Kind::UnknownAttack, "", 0.0};
}

/// Run infer and accumulate UnknownAttack rows into the bucket. Returns the
/// verdict and whether the bucket has reached capacity (retraining trigger).
/// `truth` is the simulation oracle's class name for the row.
inline std::pair<Verdict, bool> observe(PipelineState& state,
                                        std::span<const double> row,
                                        const std::string& truth) {
  Verdict v = infer(state, row);
  if (v.kind == Verdict::Kind::UnknownAttack) {
    state.bucket.rows.push_row(row);
    state.bucket.true_labels.push_back(truth);
  }
  return {v, state.bucket.full()};
}

struct RetrainOutcome {
  PipelineState state;
  /// Empty when clustering found no cluster (all noise): the bucket is kept
  /// and its capacity raised 50% for the next trigger; no version bump.
  std::optional<RetrainEvent> event;
};

/// One round of the adaptive loop: cluster the bucket, take the largest
/// cluster, label it, fold the promoted rows into tier-2 and the family
/// classifier, and refit both. Promoted rows leave the bucket; the rest stay
/// for later rounds. Tier-1 is never retrained.
inline RetrainOutcome retrain_round(const PipelineState& state,
                                    const PipelineConfig& config) {
  if (state.bucket.size() == 0) {
    throw DataError("retrain_round: bucket is empty");
  }

  const ClusterAssignment assignment =
      pipeline_detail::run_clustering(state.bucket.rows, config.clustering);

  if (assignment.n_clusters == 0) {
    RetrainOutcome out{state, std::nullopt};
    out.state.bucket.capacity = static_cast<std::size_t>(
        std::ceil(static_cast<double>(out.state.bucket.capacity) * 1.5));
    return out;
  }

  const auto [cluster_id, members] = largest_cluster(assignment);
  std::vector<std::string> member_truth;
  member_truth.reserve(members.size());
  for (std::size_t m : members) member_truth.push_back(state.bucket.true_labels[m]);
  const ClusterQuality quality =
      cluster_quality(member_truth, state.bucket.true_labels);

  const std::size_t new_version = state.version + 1;
  std::string promoted_class;
  std::vector<std::size_t> promoted;  // indices into the bucket
  if (config.labeling == LabelingMode::ground_truth_oracle) {
    // only the dominating attack type is promoted; other members would
    // poison the family classifier
    promoted_class = quality.dominant_class;
    for (std::size_t m : members) {
      if (state.bucket.true_labels[m] == promoted_class) promoted.push_back(m);
    }
  } else {
    promoted_class = "novel_" + std::to_string(new_version);
    promoted = members;
  }

  RetrainOutcome out{state, std::nullopt};
  PipelineState& next = out.state;
  next.version = new_version;

  for (std::size_t m : promoted) {
    const auto row = state.bucket.rows.row(m);
    next.tier2_train.push_row(row);
    next.family_train.push_row(row, promoted_class);
  }
  if (!next.is_known(promoted_class)) {
    next.known_classes.push_back(promoted_class);
  }

  DetectorSpec t2 = config.tier2_spec;
  t2.seed = Rng::derive(config.seed, pipeline_detail::kTier2Stream + new_version);
  next.tier2 = fit_detector(next.tier2_train, t2);
  next.family_model = extend_classes(state.family_model, next.family_train);

  // promoted rows leave the bucket; the remainder waits for the next round
  UnknownBucket remainder;
  remainder.capacity = config.bucket_capacity;
  remainder.rows.n_cols = state.bucket.rows.n_cols;
  std::vector<bool> keep(state.bucket.size(), true);
  for (std::size_t m : promoted) keep[m] = false;
  for (std::size_t i = 0; i < state.bucket.size(); ++i) {
    if (keep[i]) {
      remainder.rows.push_row(state.bucket.rows.row(i));
      remainder.true_labels.push_back(state.bucket.true_labels[i]);
    }
  }
  next.bucket = std::move(remainder);

  RetrainEvent event;
  event.round = new_version;
  event.quality = quality;
  event.promoted_class = promoted_class;
  event.promoted_count = promoted.size();
  event.new_version = new_version;
  out.event = event;
  return out;
}

}  // namespace dualtier
