#include "circgossip/observables.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace circgossip {

double l1_lyapunov(const IncrementField& field) {
  double sum = 0.0;
  for (double d : field.deltas) {
    sum += std::abs(d);
  }
  return sum;
}

CorridorMargin corridor_margin(const IncrementField& field) {
  CorridorMargin m;
  for (double d : field.deltas) {
    m.max_abs = std::max(m.max_abs, std::abs(d));
  }
  m.ok = m.max_abs < kCorridor;
  return m;
}

std::complex<double> order_parameter(const Configuration& cfg) {
  double re = 0.0;
  double im = 0.0;
  for (double a : cfg.angles()) {
    re += std::cos(a);
    im += std::sin(a);
  }
  const auto n = static_cast<double>(cfg.size());
  return {re / n, im / n};
}

ObservableSample observe(const Configuration& cfg, std::uint64_t step) {
  const IncrementField field = increment_field(cfg);
  const CorridorMargin margin = corridor_margin(field);
  const Winding w = winding_number(field);
  ObservableSample s;
  s.step = step;
  s.l1_lyapunov = l1_lyapunov(field);
  s.max_abs_delta = margin.max_abs;
  s.corridor_ok = margin.ok;
  s.winding = w.integer;
  s.winding_raw = w.raw;
  s.order_parameter = order_parameter(cfg);
  return s;
}

void write_sample_csv_header(std::ostream& os) {
  os << "step,l1_lyapunov,max_abs_delta,corridor_ok,winding,r_re,r_im,r_abs\n";
}

void write_sample_csv_row(std::ostream& os, const ObservableSample& s) {
  const std::string winding =
      s.winding ? fmt::format("{}", *s.winding) : fmt::format("{}", s.winding_raw);
  fmt::print(os, "{},{},{},{},{},{},{},{}\n", s.step, s.l1_lyapunov, s.max_abs_delta,
             s.corridor_ok ? 1 : 0, winding, s.order_parameter.real(), s.order_parameter.imag(),
             std::abs(s.order_parameter));
}

void CrossingCounter::add(const UpdateEvent& ev) {
  ++stats_.events;
  if (ev.crossing()) {
    ++stats_.crossings;
    if (!stats_.first_crossing_step) {
      stats_.first_crossing_step = ev.step;
    }
    stats_.last_crossing_step = ev.step;
  }
  if (!ev.winding_after) {
    return;
  }
  const std::int64_t after = *ev.winding_after;
  if (keep_trace_) {
    stats_.winding_trace.push_back(after);
  }
  if (last_winding_) {
    if (after != *last_winding_) {
      stats_.changes.push_back({ev.step, *last_winding_, after, ev.crossing()});
    }
    if (after - *last_winding_ != ev.winding_jump()) {
      ++inconsistencies_;
    }
  }
  last_winding_ = after;
}

CrossingStatistics crossing_statistics(std::span<const UpdateEvent> events) {
  CrossingCounter counter(std::nullopt, true);
  for (const auto& ev : events) {
    counter.add(ev);
  }
  return counter.statistics();
}

CrossingStatistics crossing_statistics(const EventLog& log) {
  CrossingCounter counter(std::nullopt, true);
  for (const auto& ev : log.events()) {
    counter.add(ev);
  }
  return counter.statistics();
}

}  // namespace circgossip
