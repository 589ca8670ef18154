#pragma once

// Experiment configuration. One JSON file per experiment; the schema is
// documented in README.md and configs/ holds one example per scenario.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "circgossip/circle.hpp"
#include "circgossip/philox.hpp"

namespace circgossip {

inline constexpr int kConfigSchemaVersion = 1;

enum class Scenario {
  PathConsensus,
  RingConsensus,
  CrossingProbMC,
  WindingFreeze,
  SweepEscape,
  CompensatorBound,
};

std::string_view scenario_name(Scenario s);
Scenario parse_scenario(std::string_view name);

enum class InitKind { IidUniform, Twist, Consensus, File };

struct InitSpec {
  InitKind kind = InitKind::IidUniform;
  std::int64_t w0 = 0;      ///< twist
  double noise = 0.0;       ///< twist: uniform perturbation in [-noise, noise]
  double alpha = 0.0;       ///< consensus
  std::string path;         ///< file: whitespace- or comma-separated angles

  bool operator==(const InitSpec&) const = default;
};

struct Tolerances {
  double eps_ant = 0.0;
  double lyapunov = 1e-12;
  double consensus = 1e-6;  ///< terminal sum |delta| counted as consensus
  double lift = 1e-9;       ///< lift invariants at resync checkpoints

  bool operator==(const Tolerances&) const = default;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  Scenario scenario = Scenario::RingConsensus;
  std::size_t n = 32;
  std::uint64_t horizon = 0;
  std::size_t replicas = 1;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  /// Empty means geometric sampling (0, 1, 2, 4, ... plus the final step).
  std::optional<std::uint64_t> sample_stride;
  unsigned threads = 0;
  std::uint64_t winding_check_stride = 1024;
  std::size_t event_log = 0;  ///< keep and write the last this-many events
  InitSpec init;
  Tolerances tolerances;

  // CrossingProbMC
  std::size_t edges_per_replica = 200;
  // SweepEscape
  std::uint64_t sweeps = 200;
  // CompensatorBound and lift checks
  std::uint64_t resync_stride = std::uint64_t{1} << 16;

  bool uses_ring() const { return scenario != Scenario::PathConsensus; }
  Topology topology() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates; throws ConfigError with a readable message.
ExperimentConfig parse_config(std::string_view json_text);
/// Reads a file; a relative init.path is resolved against the file's
/// directory.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON with every field spelled out (sorted keys, two-space
/// indent). parse_config(config_to_json(c)) == c.
std::string config_to_json(const ExperimentConfig& config);

/// Throws ConfigError when fields are inconsistent with the scenario.
void validate(const ExperimentConfig& config);

/// Initial configuration for one replica; random initial data is drawn
/// from `rng` before any dynamics.
Configuration make_initial(const ExperimentConfig& config, RandomStream& rng);

}  // namespace circgossip
