#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dualtier/common.hpp"
#include "dualtier/pipeline.hpp"

namespace dualtier {

namespace config_detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace config_detail

/// Minimal INI-style file: [section] headers, `key = value` lines, `#` or `;`
/// comments. Keys are validated by the consumer so typos fail loudly.
class IniFile {
 public:
  static IniFile parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse(text, path.string());
  }

  static IniFile parse(const std::string& text, const std::string& origin = "<string>") {
    IniFile ini;
    std::string section;
    std::string line;
    std::stringstream ss(text);
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const std::string t = config_detail::trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[') {
        if (t.back() != ']') {
          throw ConfigError(origin + ":" + std::to_string(line_no) +
                            ": malformed section header");
        }
        section = config_detail::trim(t.substr(1, t.size() - 2));
        ini.sections_[section];
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(origin + ":" + std::to_string(line_no) +
                          ": expected 'key = value'");
      }
      if (section.empty()) {
        throw ConfigError(origin + ":" + std::to_string(line_no) +
                          ": key outside any [section]");
      }
      const std::string key = config_detail::trim(t.substr(0, eq));
      const std::string value = config_detail::trim(t.substr(eq + 1));
      ini.sections_[section][key] = value;
    }
    return ini;
  }

  bool has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
  }

  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
  }

  long get_int(const std::string& section, const std::string& key,
               long fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw ConfigError("[" + section + "] " + key + ": '" + v + "' is not an integer");
    }
    return out;
  }

  double get_real(const std::string& section, const std::string& key,
                  double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw ConfigError("[" + section + "] " + key + ": '" + v + "' is not a number");
    }
    return out;
  }

  /// Reject keys outside the allowed set (catches typos).
  void expect_keys(const std::string& section,
                   const std::set<std::string>& allowed) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return;
    for (const auto& [key, value] : s->second) {
      if (!allowed.count(key)) {
        throw ConfigError("[" + section + "] unknown key '" + key + "'");
      }
    }
  }

  void expect_sections(const std::set<std::string>& allowed) const {
    for (const auto& [name, kv] : sections_) {
      if (!allowed.count(name)) {
        throw ConfigError("unknown config section [" + name + "]");
      }
    }
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// Everything a run needs; a run is reproducible from this alone.
struct ExperimentConfig {
  // [dataset]
  std::string dataset_name;
  std::filesystem::path csv_path;
  std::string label_column = "label";
  std::vector<std::string> drop_columns;
  std::filesystem::path cache_path;
  std::filesystem::path sidecar_path;

  // detectors / forest / clustering / pipeline
  PipelineConfig pipeline;

  // [cv]
  std::size_t folds = 5;
  std::vector<std::size_t> unknown_counts = {1};  // scenario sweep sizes
  std::vector<std::string> scenario_filter;        // optional scenario_id allowlist
  std::vector<std::string> explicit_unknown;       // explicit unknown class list

  // [run]
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::filesystem::path out_dir = "out";
};

inline DetectorSpec parse_detector_section(const IniFile& ini,
                                           const std::string& section) {
  ini.expect_keys(section, {"kind", "n_trees", "subsample", "k_neighbors", "external"});
  DetectorSpec spec;
  spec.kind = detector_kind_from(ini.get(section, "kind", "iforest"));
  spec.n_trees = static_cast<std::size_t>(ini.get_int(section, "n_trees", 100));
  spec.subsample_size =
      static_cast<std::size_t>(ini.get_int(section, "subsample", 256));
  spec.k_neighbors =
      static_cast<std::size_t>(ini.get_int(section, "k_neighbors", 20));
  spec.external_name = ini.get(section, "external", "");
  if (spec.kind == DetectorKind::external && spec.external_name.empty()) {
    throw ConfigError("[" + section + "] kind=external requires 'external = <name>'");
  }
  spec.validate();
  return spec;
}

inline ExperimentConfig parse_experiment_config(const IniFile& ini) {
  ini.expect_sections({"dataset", "tier1", "tier2", "forest", "clustering",
                       "pipeline", "cv", "run"});
  ini.expect_keys("dataset", {"csv", "label_column", "normal_class",
                              "drop_columns", "cache", "sidecar", "name"});
  ini.expect_keys("forest", {"n_trees", "mtry", "max_depth", "min_samples_leaf"});
  ini.expect_keys("clustering", {"algorithm", "eps", "min_pts", "dc", "peaks"});
  ini.expect_keys("pipeline", {"bucket_capacity", "max_rounds", "labeling"});
  ini.expect_keys("cv", {"folds", "unknown_count", "scenarios", "unknown_classes"});
  ini.expect_keys("run", {"seed", "workers", "out"});

  ExperimentConfig cfg;
  cfg.csv_path = ini.get("dataset", "csv", "");
  cfg.label_column = ini.get("dataset", "label_column", "label");
  cfg.drop_columns = config_detail::split_list(ini.get("dataset", "drop_columns", ""));
  cfg.cache_path = ini.get("dataset", "cache", "");
  if (cfg.cache_path.empty() && !cfg.csv_path.empty()) {
    cfg.cache_path = cfg.csv_path;
    cfg.cache_path.replace_extension(".dtid");
  }
  const std::string sidecar = ini.get("dataset", "sidecar", "");
  cfg.sidecar_path = sidecar.empty()
                         ? std::filesystem::path(cfg.cache_path.string() + ".meta")
                         : std::filesystem::path(sidecar);
  cfg.dataset_name = ini.get("dataset", "name",
                             cfg.csv_path.empty() ? cfg.cache_path.stem().string()
                                                  : cfg.csv_path.stem().string());

  cfg.pipeline.tier1_spec = parse_detector_section(ini, "tier1");
  cfg.pipeline.tier2_spec = parse_detector_section(ini, "tier2");
  cfg.pipeline.normal_class = ini.get("dataset", "normal_class", "normal");

  cfg.pipeline.forest.n_trees =
      static_cast<std::size_t>(ini.get_int("forest", "n_trees", 100));
  cfg.pipeline.forest.mtry =
      static_cast<std::size_t>(ini.get_int("forest", "mtry", 0));
  cfg.pipeline.forest.max_depth =
      static_cast<std::size_t>(ini.get_int("forest", "max_depth", 0));
  cfg.pipeline.forest.min_samples_leaf =
      static_cast<std::size_t>(ini.get_int("forest", "min_samples_leaf", 1));

  const std::string algo = ini.get("clustering", "algorithm", "dbscan");
  if (algo == "dbscan") {
    cfg.pipeline.clustering.algorithm = ClusterAlgorithm::dbscan;
  } else if (algo == "dpc") {
    cfg.pipeline.clustering.algorithm = ClusterAlgorithm::dpc;
  } else {
    throw ConfigError("[clustering] unknown algorithm '" + algo + "'");
  }
  cfg.pipeline.clustering.dbscan_params.eps = ini.get_real("clustering", "eps", 0.0);
  cfg.pipeline.clustering.dbscan_params.min_pts =
      static_cast<std::size_t>(ini.get_int("clustering", "min_pts", 5));
  cfg.pipeline.clustering.dpc_params.dc = ini.get_real("clustering", "dc", 0.0);
  cfg.pipeline.clustering.dpc_params.peaks =
      static_cast<std::size_t>(ini.get_int("clustering", "peaks", 3));

  cfg.pipeline.bucket_capacity =
      static_cast<std::size_t>(ini.get_int("pipeline", "bucket_capacity", 1000));
  cfg.pipeline.max_rounds =
      static_cast<std::size_t>(ini.get_int("pipeline", "max_rounds", 16));
  const std::string labeling = ini.get("pipeline", "labeling", "ground_truth");
  if (labeling == "ground_truth") {
    cfg.pipeline.labeling = LabelingMode::ground_truth_oracle;
  } else if (labeling == "synthetic") {
    cfg.pipeline.labeling = LabelingMode::synthetic_new_class;
  } else {
    throw ConfigError("[pipeline] unknown labeling '" + labeling + "'");
  }

  cfg.folds = static_cast<std::size_t>(ini.get_int("cv", "folds", 5));
  if (cfg.folds < 2) throw ConfigError("[cv] folds must be >= 2");
  cfg.unknown_counts.clear();
  for (const auto& u : config_detail::split_list(ini.get("cv", "unknown_count", "1"))) {
    long n = 0;
    auto [ptr, ec] = std::from_chars(u.data(), u.data() + u.size(), n);
    if (ec != std::errc() || ptr != u.data() + u.size() || n < 1) {
      throw ConfigError("[cv] unknown_count: bad entry '" + u + "'");
    }
    cfg.unknown_counts.push_back(static_cast<std::size_t>(n));
  }
  cfg.scenario_filter = config_detail::split_list(ini.get("cv", "scenarios", ""));
  cfg.explicit_unknown =
      config_detail::split_list(ini.get("cv", "unknown_classes", ""));

  cfg.seed = static_cast<std::uint64_t>(ini.get_int("run", "seed", 0));
  cfg.workers = static_cast<std::size_t>(ini.get_int("run", "workers", 1));
  if (cfg.workers < 1) cfg.workers = 1;
  cfg.out_dir = ini.get("run", "out", "out");

  cfg.pipeline.seed = cfg.seed;
  cfg.pipeline.validate();
  return cfg;
}

}  // namespace dualtier
