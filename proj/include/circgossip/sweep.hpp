#pragma once

// Linear increment transport and the cyclic sweep that never touches the
// closing edge. Pushing increment mass around the ring piles it up on the
// closing edge until a neighbour sum reaches pi and the wrapped dynamics
// sheds one unit of winding.
//
// Edges are 0-based here as elsewhere; the closing edge is N-1.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "circgossip/observables.hpp"

namespace circgossip {

/// Unwrapped ring increments with their cached sum.
class LinearIncrementState {
 public:
  explicit LinearIncrementState(std::vector<double> deltas);

  /// delta(i) = beta = 2 pi w0 / n on every edge.
  static LinearIncrementState uniform_twist(std::size_t n, std::int64_t w0);

  const std::vector<double>& deltas() const { return deltas_; }
  std::size_t size() const { return deltas_.size(); }
  double total() const { return total_; }
  double closing() const { return deltas_.back(); }
  /// Sum of the current entries (the cached total should agree).
  double recomputed_total() const;

  bool operator==(const LinearIncrementState&) const = default;

 private:
  friend void linear_increment_update_in_place(LinearIncrementState& state, std::size_t k);
  std::vector<double> deltas_;
  double total_;
};

/// delta'(k) = 0 and both cyclic neighbours gain delta(k)/2.
LinearIncrementState linear_increment_update(const LinearIncrementState& state, std::size_t k);
void linear_increment_update_in_place(LinearIncrementState& state, std::size_t k);

/// Updates edges 0, 1, ..., N-2 in order.
LinearIncrementState cyclic_sweep(const LinearIncrementState& state);

/// Closing entry after one sweep, in closed form:
///   delta(N) + (1/2 + 2^-(N-1)) delta(1) + sum_{j=2}^{N-1} 2^-(N-j) delta(j)
/// (1-based), evaluated by Horner accumulation.
double closing_edge_prediction(std::span<const double> delta0);

/// Lower bound delta(N) + 2^-(N-2) sum_{j<N} delta(j), valid for
/// nonnegative input.
double closing_edge_lower_bound(std::span<const double> delta0);

/// c = 2^-(N-2).
double sweep_contraction(std::size_t n);

/// (1 - c)^m * initial_gap.
double geometric_gap_bound(std::size_t n, std::uint64_t m, double initial_gap);

/// Largest |S-| or |S+| over the three edges around the closing edge
/// (N-2, N-1 and 0, 0-based).
double max_abs_s_near_closing(const LinearIncrementState& state);

struct SweepRecord {
  std::uint64_t sweep_index = 0;
  double closing_delta = 0.0;
  double gap = 0.0;  ///< total - closing_delta
  double geometric_bound = 0.0;
  double max_abs_s_near_closing = 0.0;
  bool operator==(const SweepRecord&) const = default;
};

struct SweepTrajectory {
  std::vector<SweepRecord> records;  ///< sweeps 0..m
  LinearIncrementState final_state;
};

SweepTrajectory iterate_sweeps(const LinearIncrementState& state, std::uint64_t sweeps);

/// sweep_index,closing_delta,gap,geometric_bound,max_abs_s_near_closing
void write_sweep_csv_header(std::ostream& os);
void write_sweep_csv_row(std::ostream& os, const SweepRecord& r);

/// Step-level linear model under the cyclic schedule: the first step whose
/// updated edge sees a neighbour sum outside (-pi, pi). Before that step the
/// wrapped dynamics and the linear model coincide.
std::optional<std::uint64_t> linear_first_crossing_step(const LinearIncrementState& state,
                                                        std::uint64_t max_steps);

struct EscapeReport {
  std::size_t n = 0;
  std::int64_t w0 = 0;
  double total = 0.0;
  /// First sweep after which a neighbour sum near the closing edge reaches pi.
  std::optional<std::uint64_t> predicted_escape_sweep;
  std::optional<std::uint64_t> predicted_first_crossing_step;
  std::vector<SweepRecord> sweeps;

  /// Wrapped-dynamics replay under the cyclic schedule.
  std::uint64_t replay_steps = 0;
  std::int64_t final_winding = 0;
  std::optional<std::uint64_t> replay_first_crossing_step;
  std::optional<std::uint64_t> steps_to_zero_winding;
  std::vector<WindingChange> winding_changes;
  std::uint64_t crossing_events = 0;
  /// Winding changes that do not match the logged crossing integers.
  std::uint64_t inconsistent_events = 0;
  /// Every change is a decrease and happens at a logged crossing event.
  bool strictly_decreasing = true;
};

struct EscapeOptions {
  std::uint64_t sweep_budget = 1000;
  std::uint64_t replay_step_budget = 10'000'000;
  std::uint64_t seed = 0;
};

EscapeReport escape_scenario(std::size_t n, std::int64_t w0, const EscapeOptions& options = {});

}  // namespace circgossip
