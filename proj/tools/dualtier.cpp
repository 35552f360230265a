// Command-line front end: prep (CSV -> binary cache), run (scenario sweep
// with cross-validated adaptive simulations), report (summary grids).

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dualtier/dualtier.hpp"

namespace fs = std::filesystem;
using namespace dualtier;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

struct CliOverrides {
  std::string config_path;
  std::string out;
  std::vector<std::string> scenarios;
  std::string detector;  // "tier1=...,tier2=..."
  long seed = -1;
  long workers = -1;
};

ExperimentConfig load_config(const CliOverrides& cli) {
  if (cli.config_path.empty()) {
    throw ConfigError("--config is required (see configs/toy.cfg)");
  }
  ExperimentConfig cfg = parse_experiment_config(IniFile::parse_file(cli.config_path));
  if (cli.seed >= 0) {
    cfg.seed = static_cast<std::uint64_t>(cli.seed);
    cfg.pipeline.seed = cfg.seed;
  }
  if (cli.workers >= 1) cfg.workers = static_cast<std::size_t>(cli.workers);
  if (!cli.out.empty()) cfg.out_dir = cli.out;
  if (!cli.scenarios.empty()) {
    cfg.scenario_filter.clear();
    for (const auto& s : cli.scenarios) {
      for (const auto& item : config_detail::split_list(s)) {
        cfg.scenario_filter.push_back(item);
      }
    }
  }
  if (!cli.detector.empty()) {
    for (const auto& item : config_detail::split_list(cli.detector)) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("--detector expects tier1=<kind>,tier2=<kind>");
      }
      const std::string tier = item.substr(0, eq);
      const DetectorKind kind = detector_kind_from(item.substr(eq + 1));
      if (tier == "tier1") {
        cfg.pipeline.tier1_spec.kind = kind;
      } else if (tier == "tier2") {
        cfg.pipeline.tier2_spec.kind = kind;
      } else {
        throw ConfigError("--detector: unknown tier '" + tier + "'");
      }
    }
  }
  return cfg;
}

int cmd_prep(const CliOverrides& cli) {
  const ExperimentConfig cfg = load_config(cli);
  if (cfg.csv_path.empty()) throw ConfigError("[dataset] csv is required for prep");

  const PreparedDataset prepared =
      prepare_dataset(cfg.csv_path.string(), cfg.label_column, cfg.drop_columns);
  save_prepared(prepared, cfg.cache_path, cfg.sidecar_path);

  std::cout << "prepared " << cfg.csv_path.string() << "\n"
            << "  rows:    " << prepared.matrix.n_rows << "\n"
            << "  columns: " << prepared.matrix.n_cols << " features + label\n"
            << "  cache:   " << cfg.cache_path.string() << "\n"
            << "  sidecar: " << cfg.sidecar_path.string() << "\n"
            << "  classes:\n";
  const auto histogram = class_histogram(prepared.matrix);
  for (std::size_t i = 0; i < histogram.size(); ++i) {
    std::cout << "    " << prepared.matrix.class_names[i] << ": " << histogram[i]
              << "\n";
  }
  return kExitOk;
}

std::vector<ScenarioSpec> select_scenarios(const ExperimentConfig& cfg,
                                           const FeatureMatrix& dataset) {
  std::set<std::string> attack_classes;
  for (const auto& name : dataset.class_names) {
    if (name != cfg.pipeline.normal_class) attack_classes.insert(name);
  }
  if (attack_classes.empty()) throw DataError("dataset has no attack classes");

  std::vector<ScenarioSpec> scenarios;
  if (!cfg.explicit_unknown.empty()) {
    ScenarioSpec spec;
    spec.scenario_id = "custom";
    for (const auto& u : cfg.explicit_unknown) {
      if (!attack_classes.count(u)) {
        throw ConfigError("[cv] unknown_classes: '" + u + "' is not an attack class");
      }
      spec.unknown_classes.insert(u);
    }
    for (const auto& a : attack_classes) {
      if (!spec.unknown_classes.count(a)) spec.known_classes.insert(a);
    }
    if (spec.known_classes.empty()) {
      throw ConfigError("[cv] unknown_classes leaves no known class");
    }
    scenarios.push_back(std::move(spec));
  } else {
    for (std::size_t u : cfg.unknown_counts) {
      if (u >= attack_classes.size()) {
        throw ConfigError("[cv] unknown_count " + std::to_string(u) +
                          " needs more than " + std::to_string(attack_classes.size()) +
                          " attack classes");
      }
      for (auto& s : enumerate_scenarios(attack_classes, u)) {
        scenarios.push_back(std::move(s));
      }
    }
  }

  if (!cfg.scenario_filter.empty()) {
    std::vector<ScenarioSpec> filtered;
    for (const auto& s : scenarios) {
      if (std::find(cfg.scenario_filter.begin(), cfg.scenario_filter.end(),
                    s.scenario_id) != cfg.scenario_filter.end()) {
        filtered.push_back(s);
      }
    }
    if (filtered.empty()) {
      throw ConfigError("--scenario matched nothing; ids look like UA1-C2");
    }
    scenarios = std::move(filtered);
  }
  return scenarios;
}

int cmd_run(const CliOverrides& cli) {
  const ExperimentConfig cfg = load_config(cli);
  if (!fs::exists(cfg.cache_path)) {
    throw DataError("prepared cache not found: " + cfg.cache_path.string() +
                    " (run 'dualtier prep' first)");
  }
  const PreparedDataset prepared = load_prepared(cfg.cache_path, cfg.sidecar_path);
  const auto scenarios = select_scenarios(cfg, prepared.matrix);

  std::vector<CvReport> reports;
  for (const auto& scenario : scenarios) {
    log_info("scenario " + scenario.scenario_id + " (" +
             std::to_string(cfg.folds) + " folds)");
    CvReport report = cross_validate(
        prepared.matrix, scenario, cfg.pipeline, cfg.folds, cfg.workers,
        [&](std::size_t fold) {
          log_info("  " + scenario.scenario_id + " fold " + std::to_string(fold) +
                   " done");
        });
    report.dataset_name = cfg.dataset_name;
    reports.push_back(std::move(report));
  }

  write_run_outputs(cfg.out_dir, reports);
  std::cout << "wrote " << reports.size() << " report document(s) to "
            << cfg.out_dir.string() << "\n";
  return kExitOk;
}

int cmd_report(const CliOverrides& cli) {
  fs::path dir = cli.out;
  if (dir.empty()) {
    if (cli.config_path.empty()) {
      throw ConfigError("report needs --out <dir> or --config with [run] out");
    }
    dir = load_config(cli).out_dir;
  }
  render_report_tables(dir, std::cout);
  std::cout << "\nflat export: " << (dir / "tables.tsv").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dual-tier adaptive intrusion-detection experiments"};
  app.require_subcommand(1);

  CliOverrides cli;
  app.add_option("--config", cli.config_path, "experiment config file (INI)");
  app.add_option("--seed", cli.seed, "override [run] seed");
  app.add_option("--workers", cli.workers, "override [run] workers");
  app.add_option("--out", cli.out, "override [run] out directory");
  app.add_option("--scenario", cli.scenarios,
                 "restrict to scenario ids (repeatable, comma lists ok)");
  app.add_option("--detector", cli.detector,
                 "override detector kinds: tier1=<kind>,tier2=<kind>");

  auto* prep = app.add_subcommand("prep", "encode a CSV into the binary cache");
  auto* run = app.add_subcommand("run", "run the configured experiments");
  auto* report = app.add_subcommand("report", "render summary grids from reports");
  for (auto* sub : {prep, run, report}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (prep->parsed()) return cmd_prep(cli);
    if (run->parsed()) return cmd_run(cli);
    if (report->parsed()) return cmd_report(cli);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "E_CONFIG " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "E_DATA " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "E_RUNTIME " << e.what() << "\n";
    return kExitRuntime;
  }
}
