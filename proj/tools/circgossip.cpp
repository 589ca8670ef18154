// circgossip: run circle-valued gossip experiments from a JSON config.
//
//   circgossip simulate      --config FILE [--seed N] [--out DIR] [--threads N]
//   circgossip crossing-prob --config FILE [--seed N] [--out DIR] [--threads N]
//   circgossip sweep         --config FILE [--seed N] [--out DIR]
//   circgossip lift-check    --config FILE [--seed N] [--out DIR] [--threads N]
//
// Exit status: 0 success, 1 a scenario check failed, 2 bad config or usage,
// 3 an invariant of the dynamics was violated, 4 I/O or other failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "circgossip/config.hpp"
#include "circgossip/errors.hpp"
#include "circgossip/scenarios.hpp"

namespace {

using namespace circgossip;

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", args.seed, "override the config seed");
  sub->add_option("--out", args.out, "override the output directory");
  sub->add_option("--threads", args.threads, "worker threads (0 = all cores)");
}

ExperimentConfig resolve(const CommonArgs& args) {
  ExperimentConfig cfg = load_config(args.config);
  if (args.seed) cfg.seed = *args.seed;
  if (args.out) cfg.output_dir = *args.out;
  if (args.threads) cfg.threads = *args.threads;
  return cfg;
}

void require_scenario(const ExperimentConfig& cfg, Scenario expected, std::string_view command) {
  if (cfg.scenario != expected) {
    throw ConfigError(fmt::format("{} needs scenario {}, config has {}", command,
                                  scenario_name(expected), scenario_name(cfg.scenario)));
  }
}

int report(const ScenarioOutcome& outcome, const ExperimentConfig& cfg) {
  std::cout << outcome.summary_json;
  std::cerr << fmt::format("wrote {} files and manifest.json to {} in {:.3f} s\n",
                           outcome.files.size(), cfg.output_dir, outcome.wall_seconds);
  for (const auto& d : outcome.diagnostics) {
    std::cerr << "check failed: " << d << "\n";
  }
  return outcome.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous midpoint gossip on the circle: simulations and checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CIRCGOSSIP_VERSION);

  CommonArgs simulate_args, crossing_args, sweep_args, lift_args;
  auto* simulate = app.add_subcommand("simulate", "run the scenario named in the config");
  add_common(simulate, simulate_args);
  auto* crossing = app.add_subcommand("crossing-prob", "first-update crossing probability (MC)");
  add_common(crossing, crossing_args);
  auto* sweep = app.add_subcommand("sweep", "cyclic-sweep transport and wrapped escape replay");
  add_common(sweep, sweep_args);
  auto* lift = app.add_subcommand("lift-check", "lift invariants at resync checkpoints");
  add_common(lift, lift_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) {
      const ExperimentConfig cfg = resolve(simulate_args);
      return report(run_scenario(cfg), cfg);
    }
    if (crossing->parsed()) {
      const ExperimentConfig cfg = resolve(crossing_args);
      require_scenario(cfg, Scenario::CrossingProbMC, "crossing-prob");
      return report(run_scenario(cfg), cfg);
    }
    if (sweep->parsed()) {
      const ExperimentConfig cfg = resolve(sweep_args);
      require_scenario(cfg, Scenario::SweepEscape, "sweep");
      return report(run_scenario(cfg), cfg);
    }
    if (lift->parsed()) {
      const ExperimentConfig cfg = resolve(lift_args);
      return report(run_lift_check(cfg), cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ConsistencyError& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return 3;
  } catch (const SectorViolation& e) {
    std::cerr << "sector violation: " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
