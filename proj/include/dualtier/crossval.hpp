#pragma once

#include <cmath>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dualtier/folds.hpp"
#include "dualtier/matrix.hpp"
#include "dualtier/normalize.hpp"
#include "dualtier/simulate.hpp"

namespace dualtier {

struct FoldResult {
  std::size_t fold = 0;
  SimulationResult sim;
};

/// Mean and population std of one headline metric across folds.
struct Aggregate {
  double mean = 0.0;
  double std_dev = 0.0;
};

inline Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  if (values.empty()) return a;
  const double n = static_cast<double>(values.size());
  for (double v : values) a.mean += v;
  a.mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - a.mean) * (v - a.mean);
  a.std_dev = std::sqrt(var / n);
  return a;
}

struct CvReport {
  std::string dataset_name;
  ScenarioSpec scenario;
  std::string tier1_kind;
  std::string tier2_kind;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<FoldResult> folds;  // raw per-fold results, never aggregates only
  std::vector<std::string> fold_warnings;

  Aggregate baseline_accuracy;
  Aggregate baseline_weighted_f1;
  Aggregate final_accuracy;
  Aggregate final_weighted_f1;
  Aggregate tier1_accuracy;
  Aggregate tier1_f1;

  void compute_aggregates() {
    std::vector<double> b_acc, b_f1, f_acc, f_f1, t1_acc, t1_f1;
    for (const auto& f : folds) {
      b_acc.push_back(f.sim.baseline.accuracy);
      b_f1.push_back(f.sim.baseline.weighted_f1);
      f_acc.push_back(f.sim.final_metrics.accuracy);
      f_f1.push_back(f.sim.final_metrics.weighted_f1);
      t1_acc.push_back(f.sim.tier1_binary.accuracy);
      t1_f1.push_back(f.sim.tier1_binary.for_class("attack").f1);
    }
    baseline_accuracy = aggregate(b_acc);
    baseline_weighted_f1 = aggregate(b_f1);
    final_accuracy = aggregate(f_acc);
    final_weighted_f1 = aggregate(f_f1);
    tier1_accuracy = aggregate(t1_acc);
    tier1_f1 = aggregate(t1_f1);
  }
};

/// Stratified k-fold evaluation of one scenario. Per fold: min-max params are
/// fit on the training split only and applied (with clipping) to both splits,
/// then the full adaptive simulation runs over the held-out fold. Folds run
/// on up to `workers` threads; results are deterministic regardless of the
/// worker count because every fold derives its own seed.
inline CvReport cross_validate(
    const FeatureMatrix& dataset, const ScenarioSpec& scenario,
    const PipelineConfig& config, std::size_t k = 5, std::size_t workers = 1,
    const std::function<void(std::size_t fold)>& fold_done = {}) {
  if (!dataset.has_labels()) throw DataError("cross_validate: unlabeled dataset");

  CvReport report;
  report.scenario = scenario;
  report.k = k;
  report.seed = config.seed;
  report.tier1_kind = to_string(config.tier1_spec.kind);
  report.tier2_kind = to_string(config.tier2_spec.kind);

  const FoldPlan plan = stratified_kfold(dataset.labels, k, config.seed);
  report.fold_warnings = plan.warnings;
  report.folds.resize(k);

  std::vector<std::optional<std::string>> errors(k);
  std::mutex progress_mutex;
  auto run_fold = [&](std::size_t f) {
    try {
      const FeatureMatrix train = select_rows(dataset, plan.train_indices(f));
      const FeatureMatrix test = select_rows(dataset, plan.folds[f]);
      const NormalizationParams norm = fit_minmax(train);

      PipelineConfig fold_config = config;
      fold_config.seed = Rng::derive(config.seed, 0xf01d + f);
      report.folds[f].fold = f;
      report.folds[f].sim = run_simulation(apply_minmax(train, norm),
                                           apply_minmax(test, norm), scenario,
                                           fold_config);
      if (fold_done) {
        const std::lock_guard<std::mutex> lock(progress_mutex);
        fold_done(f);
      }
    } catch (const std::exception& e) {
      errors[f] = e.what();
    }
  };

  if (workers <= 1) {
    for (std::size_t f = 0; f < k; ++f) run_fold(f);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t f = 0; f < k; ++f) {
      pool.emplace_back(run_fold, f);
      if (pool.size() == workers || f == k - 1) {
        for (auto& t : pool) t.join();
        pool.clear();
      }
    }
  }
  for (std::size_t f = 0; f < k; ++f) {
    if (errors[f]) {
      throw DataError("fold " + std::to_string(f) + ": " + *errors[f]);
    }
  }

  report.compute_aggregates();
  return report;
}

}  // namespace dualtier
