#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dualtier/matrix.hpp"
#include "dualtier/metrics.hpp"
#include "dualtier/pipeline.hpp"
#include "dualtier/scenario.hpp"

namespace dualtier {

/// Pseudo-prediction labels for verdicts that name no attack family. The
/// parentheses keep them from colliding with real class names.
inline const std::string kNormalVerdictLabel = "(normal)";
inline const std::string kUnknownVerdictLabel = "(unknown)";

/// Family-classification quality over the attack portion of a test set: rows
/// whose truth is any attack class, predictions taken from the full pipeline
/// verdict. Accuracy is the fraction assigned their true family, so rows
/// diverted to Normal or UnknownAttack count against it.
inline MetricsReport evaluate_known_attacks(const PipelineState& state,
                                            const FeatureMatrix& test,
                                            const std::string& normal_class) {
  std::vector<std::string> y_true, y_pred;
  for (std::size_t i = 0; i < test.n_rows; ++i) {
    const std::string& truth = test.label_name(i);
    if (truth == normal_class) continue;
    const Verdict v = infer(state, test.row(i));
    y_true.push_back(truth);
    switch (v.kind) {
      case Verdict::Kind::Normal: y_pred.push_back(kNormalVerdictLabel); break;
      case Verdict::Kind::UnknownAttack: y_pred.push_back(kUnknownVerdictLabel); break;
      case Verdict::Kind::KnownAttack: y_pred.push_back(v.family); break;
    }
  }
  if (y_true.empty()) throw DataError("evaluate_known_attacks: no attack rows in test set");

  // class list: test's attack classes in table order, the pseudo labels,
  // then any predicted family missing from the test table (novel_N names)
  std::vector<std::string> classes;
  for (const auto& name : test.class_names) {
    if (name != normal_class) classes.push_back(name);
  }
  classes.push_back(kNormalVerdictLabel);
  classes.push_back(kUnknownVerdictLabel);
  for (const auto& p : y_pred) {
    if (std::find(classes.begin(), classes.end(), p) == classes.end()) {
      classes.push_back(p);
    }
  }
  return multiclass_metrics(confusion(y_true, y_pred, classes));
}

/// Tier-1 normal-vs-attack quality over the whole test set (positive class
/// "attack").
inline MetricsReport evaluate_tier1_binary(const PipelineState& state,
                                           const FeatureMatrix& test,
                                           const std::string& normal_class) {
  std::vector<std::string> y_true, y_pred;
  for (std::size_t i = 0; i < test.n_rows; ++i) {
    y_true.push_back(test.label_name(i) == normal_class ? "normal" : "attack");
    const Verdict v = infer(state, test.row(i));
    y_pred.push_back(v.kind == Verdict::Kind::Normal ? "normal" : "attack");
  }
  return binary_metrics(confusion(y_true, y_pred, {"attack", "normal"}), "attack");
}

/// Tier-2 known-vs-unknown quality, measured the way the second tier sees its
/// input: attack-truth rows that tier-1 flagged as attacks (positive class
/// "unknown").
inline MetricsReport evaluate_tier2_binary(const PipelineState& state,
                                           const FeatureMatrix& test,
                                           const ScenarioSpec& scenario,
                                           const std::string& normal_class) {
  std::vector<std::string> y_true, y_pred;
  for (std::size_t i = 0; i < test.n_rows; ++i) {
    const std::string& truth = test.label_name(i);
    if (truth == normal_class) continue;
    const Verdict v = infer(state, test.row(i));
    if (v.kind == Verdict::Kind::Normal) continue;  // never reached tier-2
    y_true.push_back(scenario.is_unknown(truth) ? "unknown" : "known");
    y_pred.push_back(v.kind == Verdict::Kind::UnknownAttack ? "unknown" : "known");
  }
  if (y_true.empty()) {
    MetricsReport r;  // tier-1 absorbed everything; report zeros
    r.per_class = {{"known", 0, 0, 0, 0}, {"unknown", 0, 0, 0, 0}};
    return r;
  }
  return binary_metrics(confusion(y_true, y_pred, {"known", "unknown"}), "unknown");
}

/// One before/after snapshot per retraining round; record 0 is the version-0
/// baseline with pre == post.
struct TimelineRecord {
  std::size_t round = 0;
  double pre_accuracy = 0.0;
  double pre_weighted_f1 = 0.0;
  double post_accuracy = 0.0;
  double post_weighted_f1 = 0.0;
  std::string promoted_class;  // empty on the baseline record
  std::size_t promoted_count = 0;
};

struct MetricsTimeline {
  std::vector<TimelineRecord> records;
};

/// A triggered round whose clustering produced no cluster.
struct NullRoundRecord {
  std::size_t at_version = 0;
  std::size_t bucket_size = 0;
  std::size_t new_capacity = 0;
  std::size_t stream_position = 0;
};

struct SimulationResult {
  PipelineState final_state;
  MetricsTimeline timeline;
  std::vector<RetrainEvent> events;
  std::vector<NullRoundRecord> null_rounds;
  MetricsReport tier1_binary;     // version-0 normal-vs-attack
  MetricsReport tier2_binary_v0;  // version-0 known-vs-unknown
  MetricsReport baseline;         // version-0 known-attack metrics
  MetricsReport final_metrics;    // last post-round snapshot (or baseline)
};

/// The adaptive loop of the framework: train the initial models, stream the
/// test fold through observe, and on every bucket trigger run a retraining
/// round, snapshotting known-attack metrics on the full test fold before and
/// after. Stops retraining after max_rounds; the stream always runs to the
/// end. Deterministic for fixed (data, scenario, config).
inline SimulationResult run_simulation(const FeatureMatrix& train,
                                       const FeatureMatrix& test,
                                       const ScenarioSpec& scenario,
                                       const PipelineConfig& config) {
  if (!test.has_labels()) throw DataError("run_simulation: unlabeled test data");

  SimulationResult result;
  PipelineState state = train_initial(train, scenario, config);

  result.baseline = evaluate_known_attacks(state, test, config.normal_class);
  result.tier1_binary = evaluate_tier1_binary(state, test, config.normal_class);
  result.tier2_binary_v0 =
      evaluate_tier2_binary(state, test, scenario, config.normal_class);

  TimelineRecord baseline_record;
  baseline_record.round = 0;
  baseline_record.pre_accuracy = result.baseline.accuracy;
  baseline_record.pre_weighted_f1 = result.baseline.weighted_f1;
  baseline_record.post_accuracy = result.baseline.accuracy;
  baseline_record.post_weighted_f1 = result.baseline.weighted_f1;
  result.timeline.records.push_back(baseline_record);
  result.final_metrics = result.baseline;

  for (std::size_t i = 0; i < test.n_rows; ++i) {
    auto [verdict, trigger] = observe(state, test.row(i), test.label_name(i));
    (void)verdict;

    while (trigger && result.events.size() < config.max_rounds) {
      const MetricsReport pre =
          evaluate_known_attacks(state, test, config.normal_class);
      RetrainOutcome outcome = retrain_round(state, config);
      state = std::move(outcome.state);
      if (!outcome.event) {
        log_debug("no cluster in a bucket of " +
                  std::to_string(state.bucket.size()) + "; capacity raised to " +
                  std::to_string(state.bucket.capacity));
        result.null_rounds.push_back(
            {state.version, state.bucket.size(), state.bucket.capacity, i});
        break;
      }
      outcome.event->stream_position = i;
      log_debug("round " + std::to_string(outcome.event->new_version) +
                ": promoted '" + outcome.event->promoted_class + "' (" +
                std::to_string(outcome.event->promoted_count) +
                " rows, psl1=" + std::to_string(outcome.event->quality.psl1) +
                ") at stream position " + std::to_string(i));
      const MetricsReport post =
          evaluate_known_attacks(state, test, config.normal_class);
      TimelineRecord record;
      record.round = outcome.event->new_version;
      record.pre_accuracy = pre.accuracy;
      record.pre_weighted_f1 = pre.weighted_f1;
      record.post_accuracy = post.accuracy;
      record.post_weighted_f1 = post.weighted_f1;
      record.promoted_class = outcome.event->promoted_class;
      record.promoted_count = outcome.event->promoted_count;
      result.timeline.records.push_back(record);
      result.events.push_back(*outcome.event);
      result.final_metrics = post;
      trigger = state.bucket.full();
    }
  }

  result.final_state = std::move(state);
  return result;
}

}  // namespace dualtier
