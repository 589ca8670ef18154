#include "circgossip/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace circgossip {

namespace {

void require_sweepable(std::size_t n) {
  if (n < 3) {
    throw std::invalid_argument(fmt::format("cyclic sweep needs N >= 3, got {}", n));
  }
}

double sum_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

LinearIncrementState::LinearIncrementState(std::vector<double> deltas)
    : deltas_(std::move(deltas)), total_(sum_of(deltas_)) {
  require_sweepable(deltas_.size());
}

LinearIncrementState LinearIncrementState::uniform_twist(std::size_t n, std::int64_t w0) {
  return LinearIncrementState(
      std::vector<double>(n, kTwoPi * static_cast<double>(w0) / static_cast<double>(n)));
}

double LinearIncrementState::recomputed_total() const { return sum_of(deltas_); }

void linear_increment_update_in_place(LinearIncrementState& state, std::size_t k) {
  std::vector<double>& d = state.deltas_;
  const std::size_t n = d.size();
  if (k >= n) {
    throw std::out_of_range(fmt::format("edge {} out of range ({} edges)", k, n));
  }
  const double half = 0.5 * d[k];
  d[k] = 0.0;
  d[k == 0 ? n - 1 : k - 1] += half;
  d[k + 1 == n ? 0 : k + 1] += half;
}

LinearIncrementState linear_increment_update(const LinearIncrementState& state, std::size_t k) {
  LinearIncrementState out = state;
  linear_increment_update_in_place(out, k);
  return out;
}

LinearIncrementState cyclic_sweep(const LinearIncrementState& state) {
  LinearIncrementState out = state;
  for (std::size_t k = 0; k + 1 < out.size(); ++k) {
    linear_increment_update_in_place(out, k);
  }
  return out;
}

double closing_edge_prediction(std::span<const double> delta0) {
  const std::size_t n = delta0.size();
  require_sweepable(n);
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    acc = 0.5 * acc + delta0[j];
  }
  return delta0[n - 1] + 0.5 * delta0[0] + 0.5 * acc;
}

double closing_edge_lower_bound(std::span<const double> delta0) {
  const std::size_t n = delta0.size();
  require_sweepable(n);
  return delta0[n - 1] + sweep_contraction(n) * sum_of(delta0.first(n - 1));
}

double sweep_contraction(std::size_t n) {
  require_sweepable(n);
  return std::ldexp(1.0, -static_cast<int>(n - 2));
}

double geometric_gap_bound(std::size_t n, std::uint64_t m, double initial_gap) {
  return std::pow(1.0 - sweep_contraction(n), static_cast<double>(m)) * initial_gap;
}

double max_abs_s_near_closing(const LinearIncrementState& state) {
  const std::vector<double>& d = state.deltas();
  const std::size_t n = d.size();
  double worst = 0.0;
  for (std::size_t k : {n - 2, n - 1, std::size_t{0}}) {
    const double half = 0.5 * d[k];
    const double sm = d[k == 0 ? n - 1 : k - 1] + half;
    const double sp = d[k + 1 == n ? 0 : k + 1] + half;
    worst = std::max({worst, std::abs(sm), std::abs(sp)});
  }
  return worst;
}

SweepTrajectory iterate_sweeps(const LinearIncrementState& state, std::uint64_t sweeps) {
  SweepTrajectory traj{{}, state};
  traj.records.reserve(sweeps + 1);
  const double gap0 = state.total() - state.closing();
  const std::size_t n = state.size();
  auto record = [&](std::uint64_t m) {
    const LinearIncrementState& s = traj.final_state;
    traj.records.push_back({m, s.closing(), s.total() - s.closing(),
                            geometric_gap_bound(n, m, gap0), max_abs_s_near_closing(s)});
  };
  record(0);
  for (std::uint64_t m = 1; m <= sweeps; ++m) {
    for (std::size_t k = 0; k + 1 < n; ++k) {
      linear_increment_update_in_place(traj.final_state, k);
    }
    record(m);
  }
  return traj;
}

void write_sweep_csv_header(std::ostream& os) {
  os << "sweep_index,closing_delta,gap,geometric_bound,max_abs_s_near_closing\n";
}

void write_sweep_csv_row(std::ostream& os, const SweepRecord& r) {
  fmt::print(os, "{},{},{},{},{}\n", r.sweep_index, r.closing_delta, r.gap, r.geometric_bound,
             r.max_abs_s_near_closing);
}

std::optional<std::uint64_t> linear_first_crossing_step(const LinearIncrementState& state,
                                                        std::uint64_t max_steps) {
  LinearIncrementState s = state;
  const std::size_t n = s.size();
  for (std::uint64_t t = 0; t < max_steps; ++t) {
    const std::size_t k = t % (n - 1);
    const std::vector<double>& d = s.deltas();
    const double half = 0.5 * d[k];
    const double sm = d[k == 0 ? n - 1 : k - 1] + half;
    const double sp = d[k + 1] + half;
    if (!in_open_principal(sm) || !in_open_principal(sp)) {
      return t;
    }
    linear_increment_update_in_place(s, k);
  }
  return std::nullopt;
}

EscapeReport escape_scenario(std::size_t n, std::int64_t w0, const EscapeOptions& options) {
  EscapeReport report;
  report.n = n;
  report.w0 = w0;

  const LinearIncrementState linear = LinearIncrementState::uniform_twist(n, w0);
  report.total = linear.total();
  SweepTrajectory traj = iterate_sweeps(linear, options.sweep_budget);
  for (const SweepRecord& r : traj.records) {
    if (r.max_abs_s_near_closing >= kPi) {
      report.predicted_escape_sweep = r.sweep_index;
      break;
    }
  }
  report.sweeps = std::move(traj.records);
  report.predicted_first_crossing_step =
      linear_first_crossing_step(linear, options.replay_step_budget);

  SimOptions sim;
  sim.schedule = EdgeSchedule::CyclicAvoidClosing;
  SimState state(Configuration::twisted(Topology::ring(n), w0), RandomStream(options.seed, 0),
                 sim);
  CrossingCounter counter(state.winding());
  while (state.step_count() < options.replay_step_budget && state.winding() != 0) {
    counter.add(step(state));
  }
  const CrossingStatistics& stats = counter.statistics();
  report.replay_steps = state.step_count();
  report.final_winding = *state.winding();
  report.replay_first_crossing_step = stats.first_crossing_step;
  if (report.final_winding == 0) {
    report.steps_to_zero_winding = state.step_count();
  }
  report.winding_changes = stats.changes;
  report.crossing_events = stats.crossings;
  report.inconsistent_events = counter.inconsistencies();
  for (const WindingChange& c : stats.changes) {
    report.strictly_decreasing = report.strictly_decreasing && c.after < c.before && c.at_crossing;
  }
  return report;
}

}  // namespace circgossip
