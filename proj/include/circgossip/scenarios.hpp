#pragma once

#include <string>
#include <vector>

#include "circgossip/config.hpp"

namespace circgossip {

struct ScenarioOutcome {
  /// Data files written, relative to config.output_dir (manifest excluded).
  std::vector<std::string> files;
  /// Contents of summary.json.
  std::string summary_json;
  /// False when a scenario-level check failed; `diagnostics` says which.
  bool ok = true;
  std::vector<std::string> diagnostics;
  double wall_seconds = 0.0;
};

/// Runs the scenario named in the config, writes its data files,
/// summary.json and manifest.json under config.output_dir. Replica r uses
/// substream r of config.seed, so its output depends only on (seed, r).
/// Invariant violations inside the dynamics propagate as exceptions.
ScenarioOutcome run_scenario(const ExperimentConfig& config);

/// Ring trajectory with a co-moving frame attached; the lift invariants are
/// checked at every resync checkpoint and written to lift_check_rNNN.csv.
ScenarioOutcome run_lift_check(const ExperimentConfig& config);

}  // namespace circgossip
