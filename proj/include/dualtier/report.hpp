#pragma once

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dualtier/crossval.hpp"
#include "dualtier/io.hpp"

namespace dualtier {

using json = nlohmann::ordered_json;

inline json metrics_to_json(const MetricsReport& r) {
  json per_class = json::array();
  for (const auto& pc : r.per_class) {
    per_class.push_back({{"class", pc.name},
                         {"precision", pc.precision},
                         {"recall", pc.recall},
                         {"f1", pc.f1},
                         {"support", pc.support}});
  }
  return {{"accuracy", r.accuracy},
          {"weighted_f1", r.weighted_f1},
          {"macro_f1", r.macro_f1},
          {"per_class", per_class}};
}

inline json quality_to_json(const ClusterQuality& q) {
  return {{"dominant_class", q.dominant_class},
          {"d", q.d},
          {"n", q.n},
          {"t_n", q.t_n},
          {"psl1", q.psl1},
          {"psl2", q.psl2},
          {"pslc", q.pslc}};
}

inline json aggregate_to_json(const Aggregate& a) {
  return {{"mean", a.mean}, {"std", a.std_dev}};
}

/// One experiment's report document. Deliberately path-free: identical runs
/// produce byte-identical documents wherever the output lands.
inline json report_to_json(const CvReport& report) {
  json doc;
  doc["dataset"] = report.dataset_name;
  doc["scenario"] = {
      {"id", report.scenario.scenario_id},
      {"known", json::array()},
      {"unknown", json::array()},
  };
  for (const auto& c : report.scenario.known_classes) doc["scenario"]["known"].push_back(c);
  for (const auto& c : report.scenario.unknown_classes) doc["scenario"]["unknown"].push_back(c);
  doc["tier1"] = report.tier1_kind;
  doc["tier2"] = report.tier2_kind;
  doc["folds"] = report.k;
  doc["seed"] = report.seed;
  doc["aggregates"] = {
      {"tier1_accuracy", aggregate_to_json(report.tier1_accuracy)},
      {"tier1_f1", aggregate_to_json(report.tier1_f1)},
      {"baseline_accuracy", aggregate_to_json(report.baseline_accuracy)},
      {"baseline_weighted_f1", aggregate_to_json(report.baseline_weighted_f1)},
      {"final_accuracy", aggregate_to_json(report.final_accuracy)},
      {"final_weighted_f1", aggregate_to_json(report.final_weighted_f1)},
  };
  if (!report.fold_warnings.empty()) doc["warnings"] = report.fold_warnings;

  doc["per_fold"] = json::array();
  for (const auto& fold : report.folds) {
    json f;
    f["fold"] = fold.fold;
    f["tier1_binary"] = metrics_to_json(fold.sim.tier1_binary);
    f["tier2_binary_v0"] = metrics_to_json(fold.sim.tier2_binary_v0);
    f["baseline"] = metrics_to_json(fold.sim.baseline);
    f["final"] = metrics_to_json(fold.sim.final_metrics);
    f["rounds"] = fold.sim.events.size();
    f["timeline"] = json::array();
    for (const auto& rec : fold.sim.timeline.records) {
      f["timeline"].push_back({{"round", rec.round},
                               {"pre_accuracy", rec.pre_accuracy},
                               {"pre_weighted_f1", rec.pre_weighted_f1},
                               {"post_accuracy", rec.post_accuracy},
                               {"post_weighted_f1", rec.post_weighted_f1},
                               {"promoted_class", rec.promoted_class},
                               {"promoted_count", rec.promoted_count}});
    }
    f["events"] = json::array();
    for (const auto& e : fold.sim.events) {
      f["events"].push_back({{"round", e.round},
                             {"promoted_class", e.promoted_class},
                             {"promoted_count", e.promoted_count},
                             {"new_version", e.new_version},
                             {"quality", quality_to_json(e.quality)}});
    }
    doc["per_fold"].push_back(std::move(f));
  }
  return doc;
}

/// Append-only event log, one JSON record per line.
inline std::string render_event_log(const SimulationResult& sim) {
  std::ostringstream out;
  for (const auto& e : sim.events) {
    json line = {{"type", "retrain"},
                 {"round", e.round},
                 {"promoted_class", e.promoted_class},
                 {"promoted_count", e.promoted_count},
                 {"new_version", e.new_version},
                 {"stream_position", e.stream_position},
                 {"quality", quality_to_json(e.quality)}};
    out << line.dump() << "\n";
  }
  for (const auto& n : sim.null_rounds) {
    json line = {{"type", "no_cluster"},
                 {"at_version", n.at_version},
                 {"bucket_size", n.bucket_size},
                 {"new_capacity", n.new_capacity},
                 {"stream_position", n.stream_position}};
    out << line.dump() << "\n";
  }
  return out.str();
}

/// Write one report document per scenario plus per-fold event logs.
inline void write_run_outputs(const std::filesystem::path& out_dir,
                              const std::vector<CvReport>& reports) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  for (const auto& report : reports) {
    const std::string sid = report.scenario.scenario_id;
    atomic_write_file(out_dir / ("report_" + sid + ".json"),
                      report_to_json(report).dump(2) + "\n");
    for (const auto& fold : report.folds) {
      atomic_write_file(
          out_dir / ("events_" + sid + "_fold" + std::to_string(fold.fold) + ".jsonl"),
          render_event_log(fold.sim));
    }
  }
}

namespace report_detail {

inline std::string fixed2(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

inline std::string mean_std(const json& agg) {
  return fixed2(agg["mean"].get<double>()) + " ±" +
         fixed2(agg["std"].get<double>());
}

}  // namespace report_detail

/// Render the console/flat-file summary grids from written report documents:
/// a per-scenario detector grid, the PSL purity grid, and the before/after
/// retraining grid. Returns the flat text written to `tables.tsv`.
inline std::string render_report_tables(const std::filesystem::path& out_dir,
                                        std::ostream& console) {
  namespace fs = std::filesystem;
  std::vector<fs::path> report_files;
  if (!fs::exists(out_dir)) throw DataError("no such output directory: " + out_dir.string());
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("report_", 0) == 0 && entry.path().extension() == ".json") {
      report_files.push_back(entry.path());
    }
  }
  if (report_files.empty()) {
    throw DataError("no report_*.json documents in " + out_dir.string());
  }
  std::sort(report_files.begin(), report_files.end());

  std::vector<json> docs;
  for (const auto& path : report_files) {
    const auto bytes = read_file_bytes(path);
    json doc = json::parse(bytes.begin(), bytes.end(), nullptr, false);
    if (doc.is_discarded()) throw DataError("corrupt report: " + path.string());
    docs.push_back(std::move(doc));
  }

  std::ostringstream flat;
  using report_detail::fixed2;
  using report_detail::mean_std;

  console << "== Detector performance (mean ±std over folds) ==\n";
  flat << "table\tscenario\ttier1\ttier2\ttier1_acc\ttier1_f1\tfinal_acc\tfinal_f1\n";
  for (const auto& d : docs) {
    const auto& agg = d["aggregates"];
    console << "  " << d["scenario"]["id"].get<std::string>() << "  tier1="
            << d["tier1"].get<std::string>() << " tier2=" << d["tier2"].get<std::string>()
            << "  tier1 acc " << mean_std(agg["tier1_accuracy"]) << "  tier1 F1 "
            << mean_std(agg["tier1_f1"]) << "  final acc "
            << mean_std(agg["final_accuracy"]) << "  final F1 "
            << mean_std(agg["final_weighted_f1"]) << "\n";
    flat << "detector\t" << d["scenario"]["id"].get<std::string>() << "\t"
         << d["tier1"].get<std::string>() << "\t" << d["tier2"].get<std::string>() << "\t"
         << fixed2(agg["tier1_accuracy"]["mean"].get<double>()) << "\t"
         << fixed2(agg["tier1_f1"]["mean"].get<double>()) << "\t"
         << fixed2(agg["final_accuracy"]["mean"].get<double>()) << "\t"
         << fixed2(agg["final_weighted_f1"]["mean"].get<double>()) << "\n";
  }

  console << "\n== Largest-cluster purity (PSL1/PSL2/PSLC) ==\n";
  flat << "table\tscenario\tfold\tround\tpromoted\tPSL1\tPSL2\tPSLC\n";
  for (const auto& d : docs) {
    for (const auto& f : d["per_fold"]) {
      for (const auto& e : f["events"]) {
        const auto& q = e["quality"];
        console << "  " << d["scenario"]["id"].get<std::string>() << " fold "
                << f["fold"].get<int>() << " round " << e["round"].get<int>() << "  "
                << e["promoted_class"].get<std::string>() << "  PSL1 "
                << fixed2(q["psl1"].get<double>()) << "  PSL2 "
                << fixed2(q["psl2"].get<double>()) << "  PSLC "
                << fixed2(q["pslc"].get<double>()) << "\n";
        flat << "psl\t" << d["scenario"]["id"].get<std::string>() << "\t"
             << f["fold"].get<int>() << "\t" << e["round"].get<int>() << "\t"
             << e["promoted_class"].get<std::string>() << "\t"
             << fixed2(q["psl1"].get<double>()) << "\t" << fixed2(q["psl2"].get<double>())
             << "\t" << fixed2(q["pslc"].get<double>()) << "\n";
      }
    }
  }

  console << "\n== Known-attack metrics before/after retraining ==\n";
  flat << "table\tscenario\tbefore_acc\tafter_acc\tbefore_f1\tafter_f1\n";
  for (const auto& d : docs) {
    const auto& agg = d["aggregates"];
    console << "  " << d["scenario"]["id"].get<std::string>() << "  acc "
            << mean_std(agg["baseline_accuracy"]) << " -> "
            << mean_std(agg["final_accuracy"]) << "  F1 "
            << mean_std(agg["baseline_weighted_f1"]) << " -> "
            << mean_std(agg["final_weighted_f1"]) << "\n";
    flat << "retrain\t" << d["scenario"]["id"].get<std::string>() << "\t"
         << fixed2(agg["baseline_accuracy"]["mean"].get<double>()) << "\t"
         << fixed2(agg["final_accuracy"]["mean"].get<double>()) << "\t"
         << fixed2(agg["baseline_weighted_f1"]["mean"].get<double>()) << "\t"
         << fixed2(agg["final_weighted_f1"]["mean"].get<double>()) << "\n";
  }

  const std::string flat_text = flat.str();
  atomic_write_file(out_dir / "tables.tsv", flat_text);
  return flat_text;
}

}  // namespace dualtier
