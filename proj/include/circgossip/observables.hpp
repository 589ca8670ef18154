#pragma once

// Scalar diagnostics along a trajectory: the L1 Lyapunov functional, the
// corridor margin, the circular order parameter and crossing statistics.

#include <complex>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "circgossip/circle.hpp"
#include "circgossip/dynamics.hpp"

namespace circgossip {

/// Corridor threshold 2 pi / 3: no update can cross a branch while every
/// |delta| stays below it.
inline constexpr double kCorridor = 2.0 * kPi / 3.0;

/// Sum of |delta(e)| over all edges.
double l1_lyapunov(const IncrementField& field);

struct CorridorMargin {
  double max_abs = 0.0;
  bool ok = true;  ///< max_abs < 2 pi / 3
};

CorridorMargin corridor_margin(const IncrementField& field);

/// r = (1/N) sum exp(i theta(j)).
std::complex<double> order_parameter(const Configuration& cfg);

struct ObservableSample {
  std::uint64_t step = 0;
  double l1_lyapunov = 0.0;
  double max_abs_delta = 0.0;
  bool corridor_ok = true;
  /// Integer on the ring, raw total increment / 2 pi on an open path.
  std::optional<std::int64_t> winding;
  double winding_raw = 0.0;
  std::complex<double> order_parameter;

  bool operator==(const ObservableSample&) const = default;
};

ObservableSample observe(const Configuration& cfg, std::uint64_t step);

/// step,l1_lyapunov,max_abs_delta,corridor_ok,winding,r_re,r_im,r_abs
void write_sample_csv_header(std::ostream& os);
void write_sample_csv_row(std::ostream& os, const ObservableSample& s);

struct WindingChange {
  std::uint64_t step = 0;  ///< time of the pre-update state
  std::int64_t before = 0;
  std::int64_t after = 0;
  bool at_crossing = false;  ///< the event recorded m- + m+ != 0
  bool operator==(const WindingChange&) const = default;
};

struct CrossingStatistics {
  std::uint64_t events = 0;
  std::uint64_t crossings = 0;  ///< events with m- + m+ != 0
  std::optional<std::uint64_t> first_crossing_step;
  std::optional<std::uint64_t> last_crossing_step;
  /// Winding after each event, in log order (ring logs only).
  std::vector<std::int64_t> winding_trace;
  /// Where the trace changes value.
  std::vector<WindingChange> changes;
};

CrossingStatistics crossing_statistics(std::span<const UpdateEvent> events);
CrossingStatistics crossing_statistics(const EventLog& log);

/// Streaming version for observers that cannot keep the whole log.
class CrossingCounter {
 public:
  explicit CrossingCounter(std::optional<std::int64_t> initial_winding = std::nullopt,
                           bool keep_trace = false)
      : last_winding_(initial_winding), keep_trace_(keep_trace) {}

  void add(const UpdateEvent& ev);
  const CrossingStatistics& statistics() const { return stats_; }
  /// Events where the winding changed although m- + m+ == 0 (plus antipodal
  /// shifts), or did not change although a crossing was recorded.
  std::uint64_t inconsistencies() const { return inconsistencies_; }

 private:
  CrossingStatistics stats_;
  std::optional<std::int64_t> last_winding_;
  bool keep_trace_;
  std::uint64_t inconsistencies_ = 0;
};

}  // namespace circgossip
