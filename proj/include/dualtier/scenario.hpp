#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "dualtier/common.hpp"

namespace dualtier {

/// One experiment's partition of the attack classes into known and unknown
/// ("zero-day") sets. enumerate_scenarios always produces disjoint non-empty
/// covers; a hand-built spec with an empty unknown set is a valid degenerate
/// scenario for the pipeline (nothing is ever novel).
struct ScenarioSpec {
  std::set<std::string> known_classes;
  std::set<std::string> unknown_classes;
  std::string scenario_id;

  bool is_known(const std::string& cls) const {
    return known_classes.count(cls) > 0;
  }
  bool is_unknown(const std::string& cls) const {
    return unknown_classes.count(cls) > 0;
  }
};

/// All C(n, unknown_count) partitions of the attack classes, unknown sets in
/// lexicographic order over the sorted class names. Ids follow the naming
/// "UA<u>-C<i>" (u unknown classes, combination i) so reports can select
/// combinations reproducibly.
inline std::vector<ScenarioSpec> enumerate_scenarios(
    const std::set<std::string>& attack_classes, std::size_t unknown_count) {
  const std::size_t n = attack_classes.size();
  if (unknown_count < 1 || unknown_count >= n) {
    throw DataError("enumerate_scenarios: unknown_count must be in [1, " +
                    std::to_string(n) + ")");
  }
  const std::vector<std::string> names(attack_classes.begin(),
                                       attack_classes.end());

  std::vector<ScenarioSpec> scenarios;
  std::vector<std::size_t> pick(unknown_count);
  for (std::size_t i = 0; i < unknown_count; ++i) pick[i] = i;

  while (true) {
    ScenarioSpec spec;
    for (std::size_t i : pick) spec.unknown_classes.insert(names[i]);
    for (const auto& name : names) {
      if (!spec.unknown_classes.count(name)) spec.known_classes.insert(name);
    }
    spec.scenario_id = "UA" + std::to_string(unknown_count) + "-C" +
                       std::to_string(scenarios.size() + 1);
    scenarios.push_back(std::move(spec));

    // next combination in lexicographic order
    std::size_t i = unknown_count;
    while (i > 0 && pick[i - 1] == n - unknown_count + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < unknown_count; ++j) pick[j] = pick[j - 1] + 1;
  }
  return scenarios;
}

}  // namespace dualtier
