#include "circgossip/crossing.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "circgossip/circle.hpp"
#include "circgossip/dynamics.hpp"
#include "circgossip/errors.hpp"
#include "circgossip/philox.hpp"
#include "circgossip/work_pool.hpp"

namespace circgossip {

double no_crossing_prob_given_y(double y) {
  if (!(std::abs(y) <= kPi)) {
    throw DomainError(fmt::format("no_crossing_prob_given_y: {} outside [-pi, pi]", y));
  }
  const double p = 1.0 - std::abs(y) / (4.0 * kPi);
  return p * p;
}

double triangular_difference_density(double w) {
  const double a = std::abs(w);
  if (!(a < kTwoPi)) {
    return 0.0;
  }
  return (kTwoPi - a) / (4.0 * kPi * kPi);
}

double average_no_crossing_prob(std::size_t intervals) {
  const std::size_t m = intervals < 2 ? 2 : intervals + (intervals % 2);
  const double h = kTwoPi / static_cast<double>(m);
  auto f = no_crossing_prob_given_y;
  double sum = f(-kPi) + f(kPi);
  for (std::size_t i = 1; i < m; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(-kPi + h * static_cast<double>(i));
  }
  return sum * h / 3.0 / kTwoPi;
}

double CrossingMCResult::z_score() const {
  return pooled_se > 0.0 ? (pooled_mean - reference) / pooled_se : 0.0;
}

double crossing_replica_fraction(std::size_t n, std::size_t edges, std::uint64_t seed,
                                 std::uint64_t replica) {
  RandomStream rng(seed, replica);
  std::vector<double> angles(n);
  for (double& a : angles) {
    a = wrap_pi(-kPi + kTwoPi * rng.uniform_unit());
  }
  const Configuration cfg(Topology::ring(n), std::move(angles));
  const IncrementField field = increment_field(cfg);

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::size_t clean = 0;
  for (std::size_t i = 0; i < edges; ++i) {
    const std::size_t j = i + rng.uniform_index(static_cast<std::uint32_t>(n - i));
    std::swap(order[i], order[j]);
    const NeighborSums s = s_corridor(field, order[i]);
    if (in_open_principal(*s.minus) && in_open_principal(*s.plus)) {
      ++clean;
    }
  }
  return static_cast<double>(clean) / static_cast<double>(edges);
}

CrossingMCResult crossing_probability_mc(const CrossingMCOptions& options) {
  if (options.n < 3) {
    throw std::invalid_argument("crossing_probability_mc: n must be at least 3");
  }
  if (options.edges_per_replica < 1 || options.edges_per_replica > options.n) {
    throw std::invalid_argument(
        fmt::format("crossing_probability_mc: edges per replica must be in [1, {}]", options.n));
  }
  if (options.replicas < 1) {
    throw std::invalid_argument("crossing_probability_mc: need at least one replica");
  }

  CrossingMCResult result;
  result.fractions.assign(options.replicas, 0.0);
  parallel_for(options.replicas, options.threads, [&](std::size_t r) {
    result.fractions[r] =
        crossing_replica_fraction(options.n, options.edges_per_replica, options.seed, r);
  });

  const auto r = static_cast<double>(options.replicas);
  double sum = 0.0;
  for (double f : result.fractions) sum += f;
  result.pooled_mean = sum / r;
  if (options.replicas > 1) {
    double ss = 0.0;
    for (double f : result.fractions) {
      const double d = f - result.pooled_mean;
      ss += d * d;
    }
    result.pooled_se = std::sqrt(ss / (r - 1.0)) / std::sqrt(r);
  }
  return result;
}

}  // namespace circgossip
