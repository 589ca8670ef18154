#pragma once

// Asynchronous short-arc midpoint dynamics ("gossip averaging" on the
// circle): pick an edge, move both endpoints to the midpoint of the shortest
// arc between them. Alongside each update we record the neighbour sums
// S-(k) = delta(k-1) + delta(k)/2 and S+(k) = delta(k+1) + delta(k)/2 and the
// branch-crossing integers m-, m+ that account for every change of the ring
// winding number: W(t+1) = W(t) - (m- + m+).

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "circgossip/circle.hpp"
#include "circgossip/philox.hpp"

namespace circgossip {

enum class Sign : int { Minus = -1, Plus = 1 };

/// Antipodal test |delta + pi| <= eps_ant. With eps_ant = 0 this is exact
/// equality delta == -pi.
inline bool is_antipodal(double delta, double eps_ant) { return delta + kPi <= eps_ant; }

/// Midpoint update of edge e. Both endpoints receive the same value
/// wrap_pi(theta(tail) + half), where half = delta/2, so they compare equal
/// bit for bit.
///
/// Antipodal edges have two shortest arcs. `choice` picks one:
///   Plus  -> wrap_pi(theta(tail) + delta/2)       (the update-rule formula)
///   Minus -> wrap_pi(theta(tail) + delta/2 + pi)  (the opposite midpoint)
/// An antipodal edge without a choice throws ContractViolation. `choice` is
/// ignored on ordinary edges.
Configuration midpoint_update(const Configuration& cfg, std::size_t e,
                              std::optional<Sign> choice = std::nullopt, double eps_ant = 0.0);

/// Neighbour sums around edge e. On the ring both sides exist (cyclically);
/// on an open path a side is absent when edge e is the first or last edge.
struct NeighborSums {
  std::optional<double> minus;
  std::optional<double> plus;
};

NeighborSums s_corridor(const IncrementField& field, std::size_t e);
NeighborSums s_corridor(const Configuration& cfg, std::size_t e);

/// The unique m in {-1, 0, 1} with s - 2 pi m in [-pi, pi). Inputs beyond
/// [-3pi/2, 3pi/2) by more than 1e-9 throw DomainError.
int crossing_integer(double s);

struct UpdateEvent {
  std::uint64_t step = 0;  ///< time t of the pre-update state
  std::size_t edge = 0;    ///< 0-based
  double delta_before = 0.0;
  bool antipodal = false;
  std::optional<Sign> antipodal_choice;
  /// Sums use the half-increment actually applied: delta/2, or delta/2 + pi
  /// for an antipodal Minus choice.
  std::optional<double> s_minus;
  std::optional<double> s_plus;
  int m_minus = 0;
  int m_plus = 0;
  std::optional<std::int64_t> winding_after;  ///< ring only

  bool crossing() const { return m_minus != 0 || m_plus != 0; }

  /// Expected change of the ring winding across this event. For an antipodal
  /// Minus choice the applied increment is delta + 2pi, which adds +1.
  std::int64_t winding_jump() const {
    const int shift = antipodal_choice == Sign::Minus ? 1 : 0;
    return shift - (m_minus + m_plus);
  }

  bool operator==(const UpdateEvent&) const = default;
};

/// Bounded in-memory log: keeps the most recent `capacity` events (0 = keep
/// nothing, SIZE_MAX = unbounded) and counts the ones dropped.
class EventLog {
 public:
  static constexpr std::size_t kUnbounded = static_cast<std::size_t>(-1);

  explicit EventLog(std::size_t capacity = 0) : capacity_(capacity) {}

  void push(const UpdateEvent& ev);
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return events_.size(); }
  std::uint64_t dropped() const { return dropped_; }
  const std::deque<UpdateEvent>& events() const { return events_; }

  bool operator==(const EventLog&) const = default;

 private:
  std::size_t capacity_;
  std::deque<UpdateEvent> events_;
  std::uint64_t dropped_ = 0;
};

/// CSV header: step,edge,delta_before,antipodal,s_minus,s_plus,m_minus,m_plus,winding_after
/// Edges are written 1-based; absent values are empty fields.
void write_event_csv_header(std::ostream& os);
void write_event_csv_row(std::ostream& os, const UpdateEvent& ev);
void write_event_log_csv(std::ostream& os, std::span<const UpdateEvent> events);
void write_event_log_csv(std::ostream& os, const EventLog& log);

/// Where the next edge comes from.
enum class EdgeSchedule {
  Uniform,              ///< uniform over all edges, drawn from the stream
  CyclicAvoidClosing,   ///< 1, 2, ..., N-1, 1, 2, ... (never the closing edge)
};

#ifdef NDEBUG
inline constexpr std::uint64_t kDefaultWindingCheckStride = 1024;
#else
inline constexpr std::uint64_t kDefaultWindingCheckStride = 1;
#endif

struct SimOptions {
  double eps_ant = 0.0;
  /// Recompute the ring winding from scratch every this many steps and
  /// compare with the tracked value (0 disables).
  std::uint64_t winding_check_stride = kDefaultWindingCheckStride;
  /// Check that sum |delta| never increases (local O(1) check per step).
  bool check_lyapunov = true;
  double lyapunov_tolerance = 1e-12;
  std::size_t event_log_capacity = 0;
  EdgeSchedule schedule = EdgeSchedule::Uniform;

  bool operator==(const SimOptions&) const = default;
};

/// One trajectory: configuration, time, random stream and bookkeeping.
/// Copyable; owned by one thread at a time.
class SimState {
 public:
  SimState(Configuration cfg, RandomStream stream, SimOptions options = {});

  const Configuration& config() const { return cfg_; }
  std::uint64_t step_count() const { return step_; }
  const RandomStream& stream() const { return stream_; }
  const SimOptions& options() const { return options_; }
  const EventLog& event_log() const { return log_; }
  /// Tracked integer winding (ring only).
  std::optional<std::int64_t> winding() const { return winding_; }

  bool operator==(const SimState&) const = default;

 private:
  friend UpdateEvent apply_edge(SimState& state, std::size_t e);
  friend UpdateEvent step(SimState& state);

  std::size_t next_edge();

  Configuration cfg_;
  RandomStream stream_;
  SimOptions options_;
  EventLog log_;
  std::uint64_t step_ = 0;
  std::uint64_t cyclic_position_ = 0;
  std::optional<std::int64_t> winding_;
};

/// One kernel step: draw the edge (uniform or scheduled), then apply it.
UpdateEvent step(SimState& state);

/// Apply a given edge with full bookkeeping. Draw order on the stream: the
/// antipodal bit is drawn only if the edge is antipodal.
UpdateEvent apply_edge(SimState& state, std::size_t e);

/// Which steps an observer sees.
class SampleSchedule {
 public:
  static SampleSchedule geometric() { return SampleSchedule(0); }
  static SampleSchedule every(std::uint64_t k);

  /// Geometric: 0 and powers of two. Every(k): multiples of k.
  bool includes(std::uint64_t t) const;
  std::uint64_t every_k() const { return every_; }
  bool is_geometric() const { return every_ == 0; }

 private:
  explicit SampleSchedule(std::uint64_t every) : every_(every) {}
  std::uint64_t every_;
};

struct Observer {
  /// Called with the state at sampled times (including the start of the run
  /// when scheduled, and always the final state).
  std::function<void(const SimState&)> on_sample;
  /// Called after every step with the event and the post-update state.
  std::function<void(const UpdateEvent&, const SimState&)> on_event;
};

/// Applies `horizon` steps. Deterministic given the state's seed.
void run(SimState& state, std::uint64_t horizon, std::span<const Observer> observers,
         const SampleSchedule& schedule = SampleSchedule::geometric());

/// Predicates behind the stopping times of the first possible branch
/// crossing and the first antipodal edge.
struct StoppingStatus {
  bool branch_possible = false;
  bool antipodal_present = false;
};

StoppingStatus stopping_status(const Configuration& cfg, double eps_ant = 0.0);

}  // namespace circgossip
