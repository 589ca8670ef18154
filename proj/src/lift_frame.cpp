#include "circgossip/lift_frame.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "circgossip/errors.hpp"

namespace circgossip {

namespace {

constexpr double kAnchorTolerance = 1e-9;

void require_ring(const Topology& topo, const char* what) {
  if (!topo.is_ring()) {
    throw std::invalid_argument(fmt::format("{}: lifts are defined on the ring only", what));
  }
}

}  // namespace

LiftedProfile initial_lift(const Configuration& cfg) {
  require_ring(cfg.topology(), "initial_lift");
  const std::size_t n = cfg.size();
  LiftedProfile lift;
  lift.values.resize(n + 1);
  lift.values[0] = cfg[0];
  for (std::size_t i = 0; i < n; ++i) {
    lift.values[i + 1] = lift.values[i] + wrapped_increment(cfg, i);
  }
  lift.winding = ring_winding(cfg);
  return lift;
}

double LiftCheck::worst() const { return std::max({projection, increment, closing}); }

LiftCheck verify_lift(const LiftedProfile& lift, const Configuration& cfg) {
  require_ring(cfg.topology(), "verify_lift");
  const std::size_t n = cfg.size();
  if (lift.values.size() != n + 1) {
    throw std::invalid_argument(
        fmt::format("lift has {} values for {} vertices", lift.values.size(), n));
  }
  LiftCheck c;
  for (std::size_t i = 0; i <= n; ++i) {
    c.projection = std::max(c.projection, circular_distance(lift.values[i], cfg[i % n]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double d = lift.values[i + 1] - lift.values[i] - wrapped_increment(cfg, i);
    c.increment = std::max(c.increment, std::abs(d));
  }
  c.closing = std::abs(lift.values[n] - lift.values[0] -
                       kTwoPi * static_cast<double>(ring_winding(cfg)));
  return c;
}

void lift_step_in_place(LiftedProfile& lift, const UpdateEvent& event,
                        const Configuration& cfg_after) {
  if (event.crossing()) {
    throw SectorViolation(fmt::format("branch crossing at step {} (edge {}) leaves the sector",
                                      event.step, event.edge + 1));
  }
  if (event.antipodal) {
    throw SectorViolation(
        fmt::format("antipodal update at step {} (edge {})", event.step, event.edge + 1));
  }
  const std::size_t n = cfg_after.size();
  const std::size_t k = event.edge;
  std::vector<double>& eta = lift.values;
  const double mid = 0.5 * (eta[k] + eta[k + 1]);
  const double anchor = cfg_after[cfg_after.topology().tail(k)];
  if (circular_distance(mid, anchor) > kAnchorTolerance) {
    throw ConsistencyError(fmt::format(
        "lifted midpoint {} does not project onto updated angle {} at step {}", mid, anchor,
        event.step));
  }
  eta[k] = mid;
  eta[k + 1] = mid;
  for (std::size_t i = k + 2; i <= n; ++i) {
    eta[i] = eta[i - 1] + wrapped_increment(cfg_after, i - 1);
  }
  for (std::size_t i = k; i-- > 0;) {
    eta[i] = eta[i + 1] - wrapped_increment(cfg_after, i);
  }
}

LiftedProfile lift_step(const LiftedProfile& lift, const UpdateEvent& event,
                        const Configuration& cfg_after) {
  LiftedProfile out = lift;
  lift_step_in_place(out, event, cfg_after);
  return out;
}

Compensator Compensator::zero(std::size_t n, std::int64_t w0) {
  return {std::vector<double>(n, 0.0), twist_slope(w0, n)};
}

double Compensator::sum() const {
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

double Compensator::l2_per_site() const {
  double total = 0.0;
  for (double v : values) total += v * v;
  return total / static_cast<double>(values.size());
}

void compensator_step_in_place(Compensator& comp, std::size_t k) {
  const std::size_t n = comp.size();
  if (k >= n) {
    throw std::out_of_range(fmt::format("compensator edge {} out of range ({} edges)", k, n));
  }
  const std::size_t k1 = k + 1 == n ? 0 : k + 1;
  const double mean = 0.5 * (comp.values[k] + comp.values[k1]);
  comp.values[k] = mean + 0.5 * comp.beta;
  comp.values[k1] = mean - 0.5 * comp.beta;
}

Compensator compensator_step(const Compensator& comp, std::size_t k) {
  Compensator out = comp;
  compensator_step_in_place(out, k);
  return out;
}

double compensator_gradient_energy(const Compensator& comp) {
  const std::size_t n = comp.size();
  double g = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = comp.values[i] - comp.at_cyclic(i + 1);
    g += d * d;
  }
  return g;
}

double mean_one_step_drift(const Compensator& comp) {
  const std::size_t n = comp.size();
  double before = 0.0;
  for (double v : comp.values) before += v * v;
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Compensator next = compensator_step(comp, k);
    double after = 0.0;
    for (double v : next.values) after += v * v;
    total += after - before;
  }
  return total / static_cast<double>(n);
}

double drift_reference(const Compensator& comp) {
  const auto n = static_cast<double>(comp.size());
  return -compensator_gradient_energy(comp) / (2.0 * n) + 0.5 * comp.beta * comp.beta;
}

DetrendedProfile detrend(const LiftedProfile& lift, const Compensator& comp) {
  const std::size_t n = comp.size();
  if (lift.values.size() != n + 1) {
    throw std::invalid_argument(
        fmt::format("lift of {} values vs compensator of {}", lift.values.size(), n));
  }
  DetrendedProfile z;
  z.values.resize(n + 1);
  double sum = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    z.values[i] = lift.values[i] - comp.beta * static_cast<double>(i) - comp.at_cyclic(i);
    if (i < n) sum += z.values[i];
  }
  z.mean = sum / static_cast<double>(n);
  return z;
}

double variance_functional(const DetrendedProfile& zeta) {
  const std::size_t n = zeta.vertex_count();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += zeta.values[i];
  mean /= static_cast<double>(n);
  double psi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = zeta.values[i] - mean;
    psi += d * d;
  }
  return psi;
}

double zeta_diameter(const DetrendedProfile& zeta) {
  const auto first = zeta.values.begin();
  const auto [lo, hi] = std::minmax_element(first, first + static_cast<std::ptrdiff_t>(zeta.vertex_count()));
  return *hi - *lo;
}

double comoving_distance(const IncrementField& field, const Compensator& comp) {
  const std::size_t n = comp.size();
  if (field.deltas.size() != n) {
    throw std::invalid_argument("comoving_distance: field and compensator sizes differ");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = field.deltas[i] - comp.beta - (comp.at_cyclic(i + 1) - comp.values[i]);
    total += r * r;
  }
  return total / static_cast<double>(n);
}

std::vector<IncrementParts> decompose_increment(const IncrementField& field,
                                                const Compensator& comp,
                                                const DetrendedProfile& zeta) {
  const std::size_t n = comp.size();
  if (field.deltas.size() != n || zeta.values.size() != n + 1) {
    throw std::invalid_argument("decompose_increment: inconsistent sizes");
  }
  std::vector<IncrementParts> parts(n);
  for (std::size_t i = 0; i < n; ++i) {
    parts[i].trend = comp.beta;
    parts[i].drift = comp.at_cyclic(i + 1) - comp.values[i];
    parts[i].fluctuation = zeta.values[i + 1] - zeta.values[i];
  }
  return parts;
}

void write_frame_csv_header(std::ostream& os) {
  os << "step,psi_variance,zeta_diameter,d_tilde,s_l2_per_site,zeta_mean\n";
}

void write_frame_csv_row(std::ostream& os, const FrameSample& s) {
  fmt::print(os, "{},{},{},{},{},{}\n", s.step, s.psi_variance, s.zeta_diameter, s.d_tilde,
             s.s_l2_per_site, s.zeta_mean);
}

ComovingFrame::ComovingFrame(const Configuration& cfg, std::uint64_t resync_stride,
                             double resync_tolerance)
    : lift_(initial_lift(cfg)),
      comp_(Compensator::zero(cfg.size(), lift_.winding)),
      w0_(lift_.winding),
      alpha_star_(detrend(lift_, comp_).mean),
      stride_(resync_stride),
      tolerance_(resync_tolerance) {}

bool ComovingFrame::apply(const UpdateEvent& event, const Configuration& cfg_after) {
  if (event.winding_after && *event.winding_after != w0_) {
    throw SectorViolation(fmt::format("winding changed from {} to {} at step {}", w0_,
                                      *event.winding_after, event.step));
  }
  lift_step_in_place(lift_, event, cfg_after);
  compensator_step_in_place(comp_, event.edge);
  ++updates_;
  if (stride_ != 0 && updates_ % stride_ == 0) {
    resync(cfg_after);
    return true;
  }
  return false;
}

LiftCheck ComovingFrame::resync(const Configuration& cfg) {
  const LiftCheck check = verify_lift(lift_, cfg);
  last_check_ = check;
  ++record_.checkpoints;
  record_.worst = std::max(record_.worst, check.worst());
  if (!check.ok(tolerance_)) {
    ++record_.violations;
  }
  LiftedProfile fresh = initial_lift(cfg);
  if (fresh.winding != w0_) {
    throw SectorViolation(
        fmt::format("winding {} at resync differs from sector {}", fresh.winding, w0_));
  }
  const double turns = std::round((lift_.values[0] - cfg[0]) / kTwoPi);
  for (double& v : fresh.values) {
    v += kTwoPi * turns;
  }
  lift_ = std::move(fresh);
  return check;
}

FrameSample ComovingFrame::sample(const Configuration& cfg, std::uint64_t step) const {
  const DetrendedProfile z = zeta();
  FrameSample s;
  s.step = step;
  s.psi_variance = variance_functional(z);
  s.zeta_diameter = zeta_diameter(z);
  s.d_tilde = comoving_distance(increment_field(cfg), comp_);
  s.s_l2_per_site = comp_.l2_per_site();
  s.zeta_mean = z.mean;
  return s;
}

}  // namespace circgossip
