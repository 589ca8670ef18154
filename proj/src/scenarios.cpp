#include "circgossip/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "circgossip/crossing.hpp"
#include "circgossip/csv.hpp"
#include "circgossip/dynamics.hpp"
#include "circgossip/errors.hpp"
#include "circgossip/lift_frame.hpp"
#include "circgossip/manifest.hpp"
#include "circgossip/observables.hpp"
#include "circgossip/sweep.hpp"
#include "circgossip/work_pool.hpp"

namespace circgossip {

using nlohmann::json;

namespace {

struct OutputFile {
  std::string name;
  std::string contents;
};

struct ReplicaResult {
  std::vector<OutputFile> files;
  json summary;
  bool ok = true;
  std::vector<std::string> diagnostics;
};

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string replica_file(std::string_view stem, std::size_t r) {
  return fmt::format("{}_r{:03}.csv", stem, r);
}

SimOptions sim_options(const ExperimentConfig& c) {
  SimOptions o;
  o.eps_ant = c.tolerances.eps_ant;
  o.lyapunov_tolerance = c.tolerances.lyapunov;
  o.winding_check_stride = c.winding_check_stride;
  o.event_log_capacity = c.event_log;
  return o;
}

SampleSchedule sample_schedule(const ExperimentConfig& c) {
  return c.sample_stride ? SampleSchedule::every(*c.sample_stride) : SampleSchedule::geometric();
}

std::string winding_changes_csv(const std::vector<WindingChange>& changes) {
  std::ostringstream os;
  os << "step,winding_before,winding_after,at_crossing\n";
  for (const WindingChange& c : changes) {
    os << fmt::format("{},{},{},{}\n", c.step, c.before, c.after, c.at_crossing ? 1 : 0);
  }
  return os.str();
}

ReplicaResult trajectory_replica(const ExperimentConfig& c, std::size_t r) {
  RandomStream rng(c.seed, r);
  const Configuration init = make_initial(c, rng);
  SimState state(init, rng, sim_options(c));
  CrossingCounter counter(state.winding());

  std::ostringstream obs;
  write_sample_csv_header(obs);
  ObservableSample last;
  const Observer observer{
      [&](const SimState& s) {
        last = observe(s.config(), s.step_count());
        write_sample_csv_row(obs, last);
      },
      [&](const UpdateEvent& ev, const SimState&) { counter.add(ev); }};
  run(state, c.horizon, std::span(&observer, 1), sample_schedule(c));

  ReplicaResult out;
  out.files.push_back({replica_file("observables", r), obs.str()});
  const CrossingStatistics& stats = counter.statistics();
  if (c.uses_ring()) {
    out.files.push_back({replica_file("winding_changes", r), winding_changes_csv(stats.changes)});
  }
  if (c.event_log > 0) {
    std::ostringstream ev;
    write_event_log_csv(ev, state.event_log());
    out.files.push_back({replica_file("events", r), ev.str()});
  }

  const bool consensus = last.l1_lyapunov < c.tolerances.consensus;
  out.summary = {{"replica", r},
                 {"steps", state.step_count()},
                 {"final_l1_lyapunov", last.l1_lyapunov},
                 {"final_max_abs_delta", last.max_abs_delta},
                 {"final_winding", optional_json(last.winding)},
                 {"final_winding_raw", last.winding_raw},
                 {"final_r_abs", std::abs(last.order_parameter)},
                 {"consensus_reached", consensus},
                 {"crossing_events", stats.crossings},
                 {"first_crossing_step", optional_json(stats.first_crossing_step)},
                 {"last_crossing_step", optional_json(stats.last_crossing_step)},
                 {"winding_changes", stats.changes.size()},
                 {"winding_inconsistencies", counter.inconsistencies()}};
  if (counter.inconsistencies() != 0) {
    out.ok = false;
    out.diagnostics.push_back(fmt::format("replica {}: {} winding changes disagree with m-+m+",
                                          r, counter.inconsistencies()));
  }
  if (c.scenario == Scenario::WindingFreeze) {
    bool frozen = true;
    for (const WindingChange& ch : stats.changes) {
      frozen = frozen && ch.at_crossing &&
               (!stats.last_crossing_step || ch.step <= *stats.last_crossing_step);
    }
    out.summary["constant_after_last_crossing"] = frozen;
    if (!frozen) {
      out.ok = false;
      out.diagnostics.push_back(
          fmt::format("replica {}: winding changed away from a crossing event", r));
    }
  }
  return out;
}

ReplicaResult frame_replica(const ExperimentConfig& c, std::size_t r, bool lift_rows) {
  RandomStream rng(c.seed, r);
  const Configuration init = make_initial(c, rng);
  SimState state(init, rng, sim_options(c));
  ComovingFrame frame(init, c.resync_stride, c.tolerances.lift);

  const double bound = std::pow(kTwoPi * static_cast<double>(frame.w0()), 2);
  const double sum_tol = 1e-9 * static_cast<double>(c.n);
  double max_l2 = frame.compensator().l2_per_site();
  double max_abs_sum = std::abs(frame.compensator().sum());

  std::ostringstream frame_csv;
  write_frame_csv_header(frame_csv);
  std::ostringstream lift_csv;
  lift_csv << "checkpoint,step,projection,increment,closing,ok\n";

  FrameSample last;
  const Observer observer{
      [&](const SimState& s) {
        last = frame.sample(s.config(), s.step_count());
        write_frame_csv_row(frame_csv, last);
      },
      [&](const UpdateEvent& ev, const SimState& s) {
        const bool checkpoint = frame.apply(ev, s.config());
        const Compensator& comp = frame.compensator();
        max_l2 = std::max(max_l2, comp.l2_per_site());
        max_abs_sum = std::max(max_abs_sum, std::abs(comp.sum()));
        if (checkpoint) {
          const LiftCheck& lc = frame.last_check();
          lift_csv << fmt::format("{},{},{},{},{},{}\n", frame.resync_record().checkpoints,
                                  s.step_count(), lc.projection, lc.increment, lc.closing,
                                  lc.ok(c.tolerances.lift) ? 1 : 0);
        }
      }};
  run(state, c.horizon, std::span(&observer, 1), sample_schedule(c));

  ReplicaResult out;
  const ResyncRecord& rec = frame.resync_record();
  out.files.push_back({replica_file("frame", r), frame_csv.str()});
  if (lift_rows) {
    out.files.push_back({replica_file("lift_check", r), lift_csv.str()});
  }
  out.summary = {{"replica", r},
                 {"steps", state.step_count()},
                 {"w0", frame.w0()},
                 {"beta", frame.beta()},
                 {"alpha_star", frame.alpha_star()},
                 {"final_zeta_mean", last.zeta_mean},
                 {"final_zeta_diameter", last.zeta_diameter},
                 {"final_psi_variance", last.psi_variance},
                 {"final_d_tilde", last.d_tilde},
                 {"max_s_l2_per_site", max_l2},
                 {"s_l2_bound", bound},
                 {"max_abs_s_sum", max_abs_sum},
                 {"resync_checkpoints", rec.checkpoints},
                 {"resync_violations", rec.violations},
                 {"resync_worst", rec.worst}};
  if (rec.violations != 0) {
    out.ok = false;
    out.diagnostics.push_back(fmt::format("replica {}: {} lift checkpoints beyond {}", r,
                                          rec.violations, c.tolerances.lift));
  }
  if (!lift_rows) {
    if (max_l2 > bound) {
      out.ok = false;
      out.diagnostics.push_back(
          fmt::format("replica {}: per-site s L2 {} exceeds {}", r, max_l2, bound));
    }
    if (max_abs_sum > sum_tol) {
      out.ok = false;
      out.diagnostics.push_back(
          fmt::format("replica {}: |sum s| reached {} (tolerance {})", r, max_abs_sum, sum_tol));
    }
  }
  return out;
}

ReplicaResult crossing_result(const ExperimentConfig& c) {
  CrossingMCOptions opt;
  opt.n = c.n;
  opt.edges_per_replica = c.edges_per_replica;
  opt.replicas = c.replicas;
  opt.seed = c.seed;
  opt.threads = c.threads;
  const CrossingMCResult res = crossing_probability_mc(opt);

  std::ostringstream csv;
  csv << "replica,fraction\n";
  for (std::size_t r = 0; r < res.fractions.size(); ++r) {
    csv << fmt::format("{},{}\n", r, res.fractions[r]);
  }
  ReplicaResult out;
  out.files.push_back({"crossing_fractions.csv", csv.str()});
  out.summary = {{"n", c.n},
                 {"edges_per_replica", c.edges_per_replica},
                 {"replicas", c.replicas},
                 {"pooled_mean", res.pooled_mean},
                 {"pooled_se", res.pooled_se},
                 {"reference", res.reference},
                 {"z_score", res.z_score()},
                 {"within_3se", std::abs(res.pooled_mean - res.reference) <= 3.0 * res.pooled_se},
                 {"reference_by_quadrature", average_no_crossing_prob()}};
  return out;
}

ReplicaResult escape_result(const ExperimentConfig& c) {
  EscapeOptions opt;
  opt.sweep_budget = c.sweeps;
  opt.replay_step_budget = c.horizon;
  opt.seed = c.seed;
  const EscapeReport rep = escape_scenario(c.n, c.init.w0, opt);

  std::ostringstream csv;
  write_sweep_csv_header(csv);
  for (const SweepRecord& s : rep.sweeps) {
    write_sweep_csv_row(csv, s);
  }
  ReplicaResult out;
  out.files.push_back({"sweeps.csv", csv.str()});
  out.files.push_back({"winding_changes.csv", winding_changes_csv(rep.winding_changes)});
  out.summary = {{"n", rep.n},
                 {"w0", rep.w0},
                 {"total_increment", rep.total},
                 {"predicted_escape_sweep", optional_json(rep.predicted_escape_sweep)},
                 {"predicted_first_crossing_step", optional_json(rep.predicted_first_crossing_step)},
                 {"replay_first_crossing_step", optional_json(rep.replay_first_crossing_step)},
                 {"replay_steps", rep.replay_steps},
                 {"final_winding", rep.final_winding},
                 {"steps_to_zero_winding", optional_json(rep.steps_to_zero_winding)},
                 {"crossing_events", rep.crossing_events},
                 {"inconsistent_events", rep.inconsistent_events},
                 {"strictly_decreasing", rep.strictly_decreasing}};
  if (rep.inconsistent_events != 0 || !rep.strictly_decreasing) {
    out.ok = false;
    out.diagnostics.push_back("winding trace is not a decreasing step function of the crossings");
  }
  return out;
}

ScenarioOutcome finish(const ExperimentConfig& c, std::vector<ReplicaResult> results,
                       std::chrono::steady_clock::time_point start) {
  const std::filesystem::path dir = c.output_dir;
  ScenarioOutcome outcome;
  json replicas = json::array();
  for (ReplicaResult& r : results) {
    for (const OutputFile& f : r.files) {
      write_text_file(dir / f.name, f.contents);
      outcome.files.push_back(f.name);
    }
    replicas.push_back(std::move(r.summary));
    outcome.ok = outcome.ok && r.ok;
    for (auto& d : r.diagnostics) outcome.diagnostics.push_back(std::move(d));
  }
  json summary;
  summary["schema_version"] = kOutputSchemaVersion;
  summary["scenario"] = std::string(scenario_name(c.scenario));
  summary["seed"] = c.seed;
  summary["ok"] = outcome.ok;
  if (replicas.size() == 1) {
    summary["result"] = std::move(replicas[0]);
  } else {
    summary["replicas"] = std::move(replicas);
  }
  outcome.summary_json = summary.dump(2) + "\n";
  write_text_file(dir / "summary.json", outcome.summary_json);
  outcome.files.push_back("summary.json");

  outcome.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(dir, c, outcome.files, outcome.wall_seconds);
  return outcome;
}

}  // namespace

ScenarioOutcome run_scenario(const ExperimentConfig& c) {
  validate(c);
  const auto start = std::chrono::steady_clock::now();
  std::vector<ReplicaResult> results;
  switch (c.scenario) {
    case Scenario::PathConsensus:
    case Scenario::RingConsensus:
    case Scenario::WindingFreeze:
      results.resize(c.replicas);
      parallel_for(c.replicas, c.threads,
                   [&](std::size_t r) { results[r] = trajectory_replica(c, r); });
      break;
    case Scenario::CompensatorBound:
      results.resize(c.replicas);
      parallel_for(c.replicas, c.threads,
                   [&](std::size_t r) { results[r] = frame_replica(c, r, false); });
      break;
    case Scenario::CrossingProbMC:
      results.push_back(crossing_result(c));
      break;
    case Scenario::SweepEscape:
      results.push_back(escape_result(c));
      break;
  }
  return finish(c, std::move(results), start);
}

ScenarioOutcome run_lift_check(const ExperimentConfig& c) {
  validate(c);
  if (!c.uses_ring()) {
    throw ConfigError("lift checks need a ring scenario");
  }
  if (c.resync_stride == 0) {
    throw ConfigError("frame.resync_stride must be positive");
  }
  const auto start = std::chrono::steady_clock::now();
  std::vector<ReplicaResult> results(c.replicas);
  parallel_for(c.replicas, c.threads,
               [&](std::size_t r) { results[r] = frame_replica(c, r, true); });
  return finish(c, std::move(results), start);
}

}  // namespace circgossip
