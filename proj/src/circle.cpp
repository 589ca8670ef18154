#include "circgossip/circle.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

#include "circgossip/errors.hpp"

namespace circgossip {

double wrap_pi(double a) {
  if (!std::isfinite(a)) {
    throw DomainError(fmt::format("wrap_pi: non-finite input {}", a));
  }
  if (a >= -kPi && a < kPi) {
    return a;
  }
  double r = a - kTwoPi * std::floor((a + kPi) / kTwoPi);
  // The quotient can round across an integer for inputs a few ulps away from
  // an odd multiple of pi; pull the result back into the half-open range.
  if (r >= kPi) {
    r -= kTwoPi;
  } else if (r < -kPi) {
    r += kTwoPi;
  }
  return r;
}

double circular_distance(double a, double b) { return std::abs(wrap_pi(a - b)); }

std::size_t index_mod(std::int64_t i, std::size_t n) {
  if (n < 1) {
    throw std::invalid_argument("index_mod: n must be positive");
  }
  return 1 + cyclic(i - 1, n);
}

Topology::Topology(Boundary kind, std::size_t n) : kind_(kind), n_(n) {
  if (n < 2) {
    throw std::invalid_argument(fmt::format("topology needs at least 2 vertices, got {}", n));
  }
}

void Topology::check_edge(std::size_t e) const {
  if (e >= edge_count()) {
    throw std::out_of_range(
        fmt::format("edge {} out of range (1-based {}; {} edges)", e, e + 1, edge_count()));
  }
}

Configuration::Configuration(Topology topology, std::vector<double> angles)
    : topology_(topology), angles_(std::move(angles)) {
  if (angles_.size() != topology_.vertex_count()) {
    throw std::invalid_argument(fmt::format("configuration has {} angles for {} vertices",
                                            angles_.size(), topology_.vertex_count()));
  }
  for (std::size_t i = 0; i < angles_.size(); ++i) {
    const double v = angles_[i];
    if (!std::isfinite(v) || v < -kPi || v >= kPi) {
      throw DomainError(fmt::format("angle {} at vertex {} outside [-pi, pi)", v, i + 1));
    }
  }
}

Configuration Configuration::wrapped(Topology topology, std::span<const double> raw) {
  std::vector<double> angles(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    angles[i] = wrap_pi(raw[i]);
  }
  return {topology, std::move(angles)};
}

Configuration Configuration::consensus(Topology topology, double alpha) {
  return {topology, std::vector<double>(topology.vertex_count(), wrap_pi(alpha))};
}

Configuration Configuration::twisted(Topology topology, std::int64_t w0, double offset) {
  const std::size_t n = topology.vertex_count();
  std::vector<double> angles(n);
  for (std::size_t i = 0; i < n; ++i) {
    angles[i] = wrap_pi(offset + kTwoPi * static_cast<double>(w0) * static_cast<double>(i) /
                                     static_cast<double>(n));
  }
  return {topology, std::move(angles)};
}

void Configuration::set(std::size_t i, double value) {
  if (!(value >= -kPi && value < kPi)) {
    throw DomainError(fmt::format("angle {} outside [-pi, pi)", value));
  }
  angles_.at(i) = value;
}

double wrapped_increment(const Configuration& cfg, std::size_t e) {
  const Topology& topo = cfg.topology();
  topo.check_edge(e);
  return wrap_pi(cfg[topo.head(e)] - cfg[topo.tail(e)]);
}

IncrementField increment_field(const Configuration& cfg) {
  const Topology& topo = cfg.topology();
  IncrementField field{topo, std::vector<double>(topo.edge_count())};
  for (std::size_t e = 0; e < topo.edge_count(); ++e) {
    field.deltas[e] = wrap_pi(cfg[topo.head(e)] - cfg[topo.tail(e)]);
  }
  return field;
}

double total_increment(const IncrementField& field) {
  double sum = 0.0;
  for (double d : field.deltas) {
    sum += d;
  }
  return sum;
}

Winding winding_number(const IncrementField& field, std::optional<double> tolerance) {
  Winding w;
  w.raw = total_increment(field) / kTwoPi;
  if (field.topology.is_ring()) {
    const double tol = tolerance.value_or(default_winding_tolerance(field.topology.vertex_count()));
    const double nearest = std::round(w.raw);
    if (std::abs(w.raw - nearest) > tol) {
      throw ConsistencyError(
          fmt::format("ring winding {} is not integral within {}", w.raw, tol));
    }
    w.integer = static_cast<std::int64_t>(nearest);
  }
  return w;
}

std::int64_t ring_winding(const Configuration& cfg) {
  if (!cfg.topology().is_ring()) {
    throw std::invalid_argument("ring_winding: configuration is on an open path");
  }
  return *winding_number(increment_field(cfg)).integer;
}

}  // namespace circgossip
