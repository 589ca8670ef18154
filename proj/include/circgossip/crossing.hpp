#pragma once

// Probability that the very first update of a ring with iid uniform angles
// crosses a branch, estimated by Monte Carlo, and the closed-form pieces the
// exact value 11/48 is assembled from.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace circgossip {

/// Probability that the first update does not cross a branch.
inline constexpr double kNoCrossingReference = 37.0 / 48.0;

/// (1 - |y| / 4pi)^2 for |y| <= pi; DomainError otherwise. The closed
/// interval admits y = pi (value 9/16) as well as the half-open range.
double no_crossing_prob_given_y(double y);

/// Density of the difference of two independent Unif[-pi, pi) variables:
/// (2pi - |w|) / (4 pi^2) on |w| < 2pi, zero elsewhere.
double triangular_difference_density(double w);

/// Composite Simpson rule for the average of no_crossing_prob_given_y over
/// y ~ Unif[-pi, pi). `intervals` is rounded up to an even count.
double average_no_crossing_prob(std::size_t intervals = 2048);

struct CrossingMCOptions {
  std::size_t n = 4000;
  std::size_t edges_per_replica = 200;
  std::size_t replicas = 1000;
  std::uint64_t seed = 0;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

struct CrossingMCResult {
  std::vector<double> fractions;  ///< per replica, index r
  double pooled_mean = 0.0;
  /// Standard deviation of the replica fractions over sqrt(R); 0 when R = 1.
  double pooled_se = 0.0;
  double reference = kNoCrossingReference;

  double z_score() const;
};

/// Replica r draws n iid uniform angles on a ring from substream r, samples
/// `edges_per_replica` distinct edges uniformly without replacement, and
/// records the fraction whose neighbour sums both stay inside (-pi, pi).
/// Results do not depend on the thread count.
CrossingMCResult crossing_probability_mc(const CrossingMCOptions& options);

/// Fraction for a single replica.
double crossing_replica_fraction(std::size_t n, std::size_t edges, std::uint64_t seed,
                                 std::uint64_t replica);

}  // namespace circgossip
