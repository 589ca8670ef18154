#pragma once

// Universal-cover view of a ring trajectory inside one winding sector.
//
// The lift eta has N+1 real coordinates with eta(i+1) - eta(i) = delta(i), so
// eta(N+1) = eta(1) + 2 pi W. The compensator s absorbs the +-beta/2 drift the
// midpoint rule exerts on a linear profile of slope beta = 2 pi W0 / N, and the
// detrended field zeta(i) = eta(i) - beta (i-1) - s(i) then evolves by plain
// Euclidean midpoint averaging. Indices below are 0-based: eta[0..N],
// s[0..N-1], and edge k joins eta[k] and eta[k+1].

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "circgossip/circle.hpp"
#include "circgossip/dynamics.hpp"

namespace circgossip {

struct LiftedProfile {
  std::vector<double> values;  ///< N+1 entries
  std::int64_t winding = 0;

  std::size_t vertex_count() const { return values.size() - 1; }
};

/// eta[0] = theta[0], eta[i+1] = eta[i] + delta(i). Ring only
/// (std::invalid_argument otherwise).
LiftedProfile initial_lift(const Configuration& cfg);

/// Worst deviations from the three lift invariants.
struct LiftCheck {
  double projection = 0.0;  ///< max circular distance wrap(eta[i]) vs theta[i mod N]
  double increment = 0.0;   ///< max |eta[i+1] - eta[i] - delta(i)|
  double closing = 0.0;     ///< |eta[N] - eta[0] - 2 pi W|

  double worst() const;
  bool ok(double tol) const { return worst() <= tol; }
};

LiftCheck verify_lift(const LiftedProfile& lift, const Configuration& cfg);

/// Advances the lift across one update. `cfg_after` is the configuration the
/// event produced. Both lifted endpoints of the updated edge move to their
/// arithmetic midpoint and the other coordinates are rebuilt outward from it
/// using the new wrapped increments. Crossing or antipodal events throw
/// SectorViolation; a midpoint that no longer projects onto the updated angle
/// (beyond 1e-9) throws ConsistencyError.
LiftedProfile lift_step(const LiftedProfile& lift, const UpdateEvent& event,
                        const Configuration& cfg_after);
void lift_step_in_place(LiftedProfile& lift, const UpdateEvent& event,
                        const Configuration& cfg_after);

struct Compensator {
  std::vector<double> values;  ///< s[0..N-1]; s[N] is s[0]
  double beta = 0.0;

  static Compensator zero(std::size_t n, std::int64_t w0);
  std::size_t size() const { return values.size(); }
  double at_cyclic(std::size_t i) const { return values[i == values.size() ? 0 : i]; }
  double sum() const;
  /// (1/N) * sum s(i)^2.
  double l2_per_site() const;
};

inline double twist_slope(std::int64_t w0, std::size_t n) {
  return kTwoPi * static_cast<double>(w0) / static_cast<double>(n);
}

/// s'(k) = (s(k) + s(k+1))/2 + beta/2, s'(k+1) = (s(k) + s(k+1))/2 - beta/2,
/// cyclically. Throws std::out_of_range for k >= N.
Compensator compensator_step(const Compensator& comp, std::size_t k);
void compensator_step_in_place(Compensator& comp, std::size_t k);

/// sum over edges of (s(i) - s(i+1))^2, cyclic.
double compensator_gradient_energy(const Compensator& comp);

/// Exact expectation of ||s'||^2 - ||s||^2 over a uniformly chosen edge,
/// evaluated by applying every edge once.
double mean_one_step_drift(const Compensator& comp);

/// -(1/2N) * gradient energy + beta^2 / 2.
double drift_reference(const Compensator& comp);

struct DetrendedProfile {
  std::vector<double> values;  ///< zeta[0..N]; zeta[N] == zeta[0]
  double mean = 0.0;           ///< over zeta[0..N-1]

  std::size_t vertex_count() const { return values.size() - 1; }
};

/// zeta(i) = eta(i) - beta * i - s(i) (0-based), s(N) := s(0).
DetrendedProfile detrend(const LiftedProfile& lift, const Compensator& comp);

/// sum (zeta(i) - mean)^2 over i < N.
double variance_functional(const DetrendedProfile& zeta);

/// max - min over i < N.
double zeta_diameter(const DetrendedProfile& zeta);

/// (1/N) sum (delta(i) - beta - (s(i+1) - s(i)))^2.
double comoving_distance(const IncrementField& field, const Compensator& comp);

struct IncrementParts {
  double trend = 0.0;        ///< beta
  double drift = 0.0;        ///< s(i+1) - s(i)
  double fluctuation = 0.0;  ///< zeta(i+1) - zeta(i)
  double sum() const { return trend + drift + fluctuation; }
};

std::vector<IncrementParts> decompose_increment(const IncrementField& field,
                                                const Compensator& comp,
                                                const DetrendedProfile& zeta);

struct FrameSample {
  std::uint64_t step = 0;
  double psi_variance = 0.0;
  double zeta_diameter = 0.0;
  double d_tilde = 0.0;
  double s_l2_per_site = 0.0;
  double zeta_mean = 0.0;
  bool operator==(const FrameSample&) const = default;
};

/// step,psi_variance,zeta_diameter,d_tilde,s_l2_per_site,zeta_mean
void write_frame_csv_header(std::ostream& os);
void write_frame_csv_row(std::ostream& os, const FrameSample& s);

struct ResyncRecord {
  std::uint64_t checkpoints = 0;
  std::uint64_t violations = 0;
  double worst = 0.0;
};

/// Lift, compensator and detrended statistics bound to one ring trajectory
/// in a fixed winding sector W0. beta and alpha_star = mean(zeta_0) are set
/// once at construction.
class ComovingFrame {
 public:
  static constexpr std::uint64_t kDefaultResyncStride = std::uint64_t{1} << 16;
  static constexpr double kDefaultResyncTolerance = 1e-9;

  explicit ComovingFrame(const Configuration& cfg,
                         std::uint64_t resync_stride = kDefaultResyncStride,
                         double resync_tolerance = kDefaultResyncTolerance);

  /// Advances lift and compensator. Throws SectorViolation on a crossing,
  /// an antipodal update or a winding different from W0.
  /// Returns true when the update triggered a resync checkpoint.
  bool apply(const UpdateEvent& event, const Configuration& cfg_after);

  /// Verifies the lift against `cfg` and rebuilds it from the configuration,
  /// keeping the integer offset eta[0] - theta[0]. Returns the check made
  /// before the rebuild.
  LiftCheck resync(const Configuration& cfg);

  const LiftedProfile& lift() const { return lift_; }
  const Compensator& compensator() const { return comp_; }
  DetrendedProfile zeta() const { return detrend(lift_, comp_); }
  std::int64_t w0() const { return w0_; }
  double beta() const { return comp_.beta; }
  double alpha_star() const { return alpha_star_; }
  std::uint64_t updates() const { return updates_; }
  const ResyncRecord& resync_record() const { return record_; }
  const LiftCheck& last_check() const { return last_check_; }

  FrameSample sample(const Configuration& cfg, std::uint64_t step) const;

 private:
  LiftedProfile lift_;
  Compensator comp_;
  std::int64_t w0_;
  double alpha_star_;
  std::uint64_t stride_;
  double tolerance_;
  std::uint64_t updates_ = 0;
  ResyncRecord record_;
  LiftCheck last_check_;
};

}  // namespace circgossip
