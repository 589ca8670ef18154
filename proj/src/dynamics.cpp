#include "circgossip/dynamics.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "circgossip/errors.hpp"

namespace circgossip {

namespace {

std::optional<std::size_t> left_edge(const Topology& topo, std::size_t e) {
  if (e > 0) {
    return e - 1;
  }
  if (topo.is_ring()) {
    return topo.edge_count() - 1;
  }
  return std::nullopt;
}

std::optional<std::size_t> right_edge(const Topology& topo, std::size_t e) {
  if (e + 1 < topo.edge_count()) {
    return e + 1;
  }
  if (topo.is_ring()) {
    return 0;
  }
  return std::nullopt;
}

double half_increment(double delta, bool antipodal, std::optional<Sign> choice) {
  double half = 0.5 * delta;
  if (antipodal && choice == Sign::Minus) {
    half += kPi;
  }
  return half;
}

}  // namespace

Configuration midpoint_update(const Configuration& cfg, std::size_t e, std::optional<Sign> choice,
                              double eps_ant) {
  const Topology& topo = cfg.topology();
  topo.check_edge(e);
  const double delta = wrapped_increment(cfg, e);
  const bool antipodal = is_antipodal(delta, eps_ant);
  if (antipodal && !choice) {
    throw ContractViolation(
        fmt::format("edge {} is antipodal (delta = {}) and no midpoint choice was given", e + 1,
                    delta));
  }
  const double mid = wrap_pi(cfg[topo.tail(e)] + half_increment(delta, antipodal, choice));
  Configuration out = cfg;
  out.set(topo.tail(e), mid);
  out.set(topo.head(e), mid);
  return out;
}

NeighborSums s_corridor(const IncrementField& field, std::size_t e) {
  const Topology& topo = field.topology;
  topo.check_edge(e);
  const double half = 0.5 * field.deltas[e];
  NeighborSums sums;
  if (auto l = left_edge(topo, e)) {
    sums.minus = field.deltas[*l] + half;
  }
  if (auto r = right_edge(topo, e)) {
    sums.plus = field.deltas[*r] + half;
  }
  return sums;
}

NeighborSums s_corridor(const Configuration& cfg, std::size_t e) {
  const Topology& topo = cfg.topology();
  topo.check_edge(e);
  const double half = 0.5 * wrapped_increment(cfg, e);
  NeighborSums sums;
  if (auto l = left_edge(topo, e)) {
    sums.minus = wrapped_increment(cfg, *l) + half;
  }
  if (auto r = right_edge(topo, e)) {
    sums.plus = wrapped_increment(cfg, *r) + half;
  }
  return sums;
}

int crossing_integer(double s) {
  constexpr double kLimit = 1.5 * kPi;
  constexpr double kSlack = 1e-9;
  if (!std::isfinite(s) || s >= kLimit + kSlack || s < -kLimit - kSlack) {
    throw DomainError(fmt::format("neighbour sum {} outside [-3pi/2, 3pi/2)", s));
  }
  if (s >= kPi) {
    return 1;
  }
  if (s < -kPi) {
    return -1;
  }
  return 0;
}

void EventLog::push(const UpdateEvent& ev) {
  if (capacity_ == 0) {
    ++dropped_;
    return;
  }
  if (events_.size() == capacity_) {
    events_.pop_front();
    ++dropped_;
  }
  events_.push_back(ev);
}

void write_event_csv_header(std::ostream& os) {
  os << "step,edge,delta_before,antipodal,s_minus,s_plus,m_minus,m_plus,winding_after\n";
}

void write_event_csv_row(std::ostream& os, const UpdateEvent& ev) {
  auto opt = [](const std::optional<double>& v) {
    return v ? fmt::format("{}", *v) : std::string();
  };
  fmt::print(os, "{},{},{},{},{},{},{},{},{}\n", ev.step, ev.edge + 1, ev.delta_before,
             ev.antipodal ? 1 : 0, opt(ev.s_minus), opt(ev.s_plus), ev.m_minus, ev.m_plus,
             ev.winding_after ? fmt::format("{}", *ev.winding_after) : std::string());
}

void write_event_log_csv(std::ostream& os, std::span<const UpdateEvent> events) {
  write_event_csv_header(os);
  for (const auto& ev : events) {
    write_event_csv_row(os, ev);
  }
}

void write_event_log_csv(std::ostream& os, const EventLog& log) {
  write_event_csv_header(os);
  for (const auto& ev : log.events()) {
    write_event_csv_row(os, ev);
  }
}

SimState::SimState(Configuration cfg, RandomStream stream, SimOptions options)
    : cfg_(std::move(cfg)),
      stream_(stream),
      options_(options),
      log_(options.event_log_capacity) {
  const Topology& topo = cfg_.topology();
  if (topo.is_ring() && topo.vertex_count() < 3) {
    throw std::invalid_argument("ring dynamics needs at least 3 vertices");
  }
  if (!(options_.eps_ant >= 0.0)) {
    throw std::invalid_argument("eps_ant must be non-negative");
  }
  if (options_.schedule == EdgeSchedule::CyclicAvoidClosing && topo.vertex_count() < 3) {
    throw std::invalid_argument("cyclic sweep schedule needs at least 3 vertices");
  }
  if (topo.is_ring()) {
    winding_ = ring_winding(cfg_);
  }
}

std::size_t SimState::next_edge() {
  const Topology& topo = cfg_.topology();
  switch (options_.schedule) {
    case EdgeSchedule::Uniform:
      return stream_.uniform_index(static_cast<std::uint32_t>(topo.edge_count()));
    case EdgeSchedule::CyclicAvoidClosing: {
      const std::size_t e = cyclic_position_ % (topo.vertex_count() - 1);
      ++cyclic_position_;
      return e;
    }
  }
  throw std::logic_error("unknown edge schedule");
}

UpdateEvent apply_edge(SimState& state, std::size_t e) {
  Configuration& cfg = state.cfg_;
  const Topology& topo = cfg.topology();
  topo.check_edge(e);

  UpdateEvent ev;
  ev.step = state.step_;
  ev.edge = e;
  ev.delta_before = wrapped_increment(cfg, e);
  ev.antipodal = is_antipodal(ev.delta_before, state.options_.eps_ant);
  if (ev.antipodal) {
    ev.antipodal_choice = state.stream_.fair_bit() ? Sign::Plus : Sign::Minus;
  }
  const double half = half_increment(ev.delta_before, ev.antipodal, ev.antipodal_choice);

  const auto le = left_edge(topo, e);
  const auto re = right_edge(topo, e);
  const double dl = le ? wrapped_increment(cfg, *le) : 0.0;
  const double dr = re ? wrapped_increment(cfg, *re) : 0.0;
  if (le) {
    ev.s_minus = dl + half;
    ev.m_minus = crossing_integer(*ev.s_minus);
  }
  if (re) {
    ev.s_plus = dr + half;
    ev.m_plus = crossing_integer(*ev.s_plus);
  }

  const double mid = wrap_pi(cfg[topo.tail(e)] + half);
  cfg.set(topo.tail(e), mid);
  cfg.set(topo.head(e), mid);

  if (state.options_.check_lyapunov) {
    const double before = std::abs(dl) + std::abs(ev.delta_before) + std::abs(dr);
    double after = std::abs(wrapped_increment(cfg, e));
    if (le) after += std::abs(wrapped_increment(cfg, *le));
    if (re) after += std::abs(wrapped_increment(cfg, *re));
    if (after > before + state.options_.lyapunov_tolerance) {
      throw ConsistencyError(fmt::format(
          "sum |delta| increased by {} at step {} (edge {})", after - before, ev.step, e + 1));
    }
  }

  ++state.step_;
  if (state.winding_) {
    *state.winding_ += ev.winding_jump();
    ev.winding_after = state.winding_;
    const std::uint64_t stride = state.options_.winding_check_stride;
    if (stride != 0 && state.step_ % stride == 0) {
      const std::int64_t actual = ring_winding(cfg);
      if (actual != *state.winding_) {
        throw ConsistencyError(fmt::format(
            "winding jump identity violated at step {}: tracked {}, recomputed {}", ev.step,
            *state.winding_, actual));
      }
    }
  }
  state.log_.push(ev);
  return ev;
}

UpdateEvent step(SimState& state) { return apply_edge(state, state.next_edge()); }

SampleSchedule SampleSchedule::every(std::uint64_t k) {
  if (k == 0) {
    throw std::invalid_argument("sample stride must be positive");
  }
  return SampleSchedule(k);
}

bool SampleSchedule::includes(std::uint64_t t) const {
  if (every_ == 0) {
    return t == 0 || (t & (t - 1)) == 0;
  }
  return t % every_ == 0;
}

void run(SimState& state, std::uint64_t horizon, std::span<const Observer> observers,
         const SampleSchedule& schedule) {
  auto sample = [&] {
    for (const auto& obs : observers) {
      if (obs.on_sample) obs.on_sample(state);
    }
  };
  bool any_events = false;
  for (const auto& obs : observers) {
    any_events = any_events || static_cast<bool>(obs.on_event);
  }

  bool sampled_current = false;
  if (schedule.includes(state.step_count())) {
    sample();
    sampled_current = true;
  }
  for (std::uint64_t i = 0; i < horizon; ++i) {
    const UpdateEvent ev = step(state);
    if (any_events) {
      for (const auto& obs : observers) {
        if (obs.on_event) obs.on_event(ev, state);
      }
    }
    sampled_current = schedule.includes(state.step_count());
    if (sampled_current) {
      sample();
    }
  }
  if (!sampled_current) {
    sample();
  }
}

StoppingStatus stopping_status(const Configuration& cfg, double eps_ant) {
  const IncrementField field = increment_field(cfg);
  StoppingStatus status;
  for (std::size_t e = 0; e < field.deltas.size(); ++e) {
    if (is_antipodal(field.deltas[e], eps_ant)) {
      status.antipodal_present = true;
    }
    const NeighborSums sums = s_corridor(field, e);
    if ((sums.minus && !in_open_principal(*sums.minus)) ||
        (sums.plus && !in_open_principal(*sums.plus))) {
      status.branch_possible = true;
    }
  }
  return status;
}

}  // namespace circgossip
