#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "circgossip/circle.hpp"
#include "circgossip/crossing.hpp"
#include "circgossip/errors.hpp"
#include "oracles.hpp"

using namespace circgossip;

// ================================================================ closed forms

TEST(NoCrossingGivenY, Examples) {
  EXPECT_EQ(no_crossing_prob_given_y(0.0), 1.0);
  EXPECT_DOUBLE_EQ(no_crossing_prob_given_y(kPi), 9.0 / 16.0);
  EXPECT_DOUBLE_EQ(no_crossing_prob_given_y(-kPi), 9.0 / 16.0);
  EXPECT_DOUBLE_EQ(no_crossing_prob_given_y(kPi / 2), (7.0 / 8.0) * (7.0 / 8.0));
}

TEST(NoCrossingGivenY, DomainErrors) {
  EXPECT_THROW(no_crossing_prob_given_y(4.0), DomainError);
  EXPECT_THROW(no_crossing_prob_given_y(-4.0), DomainError);
  EXPECT_THROW(no_crossing_prob_given_y(std::nan("")), DomainError);
}

TEST(NoCrossingGivenY, AverageIsReference) {
  EXPECT_NEAR(average_no_crossing_prob(), 37.0 / 48.0, 1e-9);
  EXPECT_NEAR(kNoCrossingReference, 0.770833, 1e-6);
}

TEST(NoCrossingGivenY, MatchesConditionalGridCount) {
  // For fixed y the event on X is an interval of length 2pi - |y|/2 out of 2pi.
  const int m = 20000;
  for (double y : {-3.0, -1.0, 0.0, 0.5, 2.9}) {
    long inside = 0;
    for (int i = 0; i < m; ++i) {
      const double x = -kPi + (i + 0.5) * kTwoPi / m;
      const double s = x + y / 2;
      if (s > -kPi && s < kPi) ++inside;
    }
    const double p = static_cast<double>(inside) / m;
    EXPECT_NEAR(no_crossing_prob_given_y(y), p * p, 2e-4) << y;
  }
}

TEST(TriangularDensity, Examples) {
  EXPECT_DOUBLE_EQ(triangular_difference_density(0.0), 1.0 / kTwoPi);
  EXPECT_EQ(triangular_difference_density(kTwoPi), 0.0);
  EXPECT_EQ(triangular_difference_density(-kTwoPi), 0.0);
  EXPECT_EQ(triangular_difference_density(10.0), 0.0);
}

TEST(TriangularDensity, IntegratesToOne) {
  const int m = 200000;
  const double h = 4 * kPi / m;
  double sum = 0.0;
  for (int i = 0; i < m; ++i) sum += triangular_difference_density(-kTwoPi + (i + 0.5) * h);
  EXPECT_NEAR(sum * h, 1.0, 1e-9);
}

TEST(TriangularDensity, WrappedSumIsUniform) {
  for (double y = -kPi; y < kPi; y += 0.37) {
    double total = 0.0;
    for (int m = -1; m <= 1; ++m) total += triangular_difference_density(y + kTwoPi * m);
    EXPECT_NEAR(total, 1.0 / kTwoPi, 1e-15) << y;
  }
}

TEST(CrossingOracle, GridQuadratureGivesElevenOver48) {
  EXPECT_NEAR(oracle::crossing_probability_grid(4000), 11.0 / 48.0, 1e-4);
}

// ================================================================ Monte Carlo

TEST(CrossingMC, SingleBernoulliIsReproducible) {
  CrossingMCOptions o;
  o.n = 50;
  o.edges_per_replica = 1;
  o.replicas = 1;
  o.seed = 123;
  const CrossingMCResult a = crossing_probability_mc(o);
  const CrossingMCResult b = crossing_probability_mc(o);
  ASSERT_EQ(a.fractions.size(), 1u);
  EXPECT_TRUE(a.fractions[0] == 0.0 || a.fractions[0] == 1.0);
  EXPECT_EQ(a.fractions, b.fractions);
  EXPECT_EQ(a.pooled_se, 0.0);
}

TEST(CrossingMC, ThreadCountDoesNotMatter) {
  CrossingMCOptions o;
  o.n = 300;
  o.edges_per_replica = 40;
  o.replicas = 64;
  o.seed = 9;
  o.threads = 1;
  const CrossingMCResult one = crossing_probability_mc(o);
  o.threads = 4;
  const CrossingMCResult four = crossing_probability_mc(o);
  EXPECT_EQ(one.fractions, four.fractions);
  EXPECT_EQ(one.pooled_mean, four.pooled_mean);
  for (std::size_t r = 0; r < one.fractions.size(); ++r) {
    EXPECT_EQ(one.fractions[r], crossing_replica_fraction(300, 40, 9, r));
  }
}

TEST(CrossingMC, DeskScaleWithinThreeStandardErrors) {
  CrossingMCOptions o;
  o.n = 500;
  o.edges_per_replica = 50;
  o.replicas = 200;
  o.seed = 11;
  const CrossingMCResult r = crossing_probability_mc(o);
  for (double f : r.fractions) {
    ASSERT_GE(f, 0.0);
    ASSERT_LE(f, 1.0);
  }
  EXPECT_GT(r.pooled_se, 0.0);
  EXPECT_LE(std::abs(r.pooled_mean - kNoCrossingReference), 3 * r.pooled_se);
  EXPECT_NEAR(r.z_score(), (r.pooled_mean - kNoCrossingReference) / r.pooled_se, 1e-15);
}

TEST(CrossingMC, MetaRunCoverage) {
  const int meta_runs = 100;
  int covered = 0;
  for (int k = 0; k < meta_runs; ++k) {
    CrossingMCOptions o;
    o.seed = 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(k);
    const CrossingMCResult r = crossing_probability_mc(o);
    if (std::abs(r.pooled_mean - kNoCrossingReference) <= 3 * r.pooled_se) ++covered;
  }
  EXPECT_GE(covered, 99);
}

TEST(CrossingMC, InvalidArguments) {
  CrossingMCOptions o;
  o.n = 2;
  EXPECT_THROW(crossing_probability_mc(o), std::invalid_argument);
  o.n = 10;
  o.edges_per_replica = 11;
  EXPECT_THROW(crossing_probability_mc(o), std::invalid_argument);
  o.edges_per_replica = 0;
  EXPECT_THROW(crossing_probability_mc(o), std::invalid_argument);
  o.edges_per_replica = 5;
  o.replicas = 0;
  EXPECT_THROW(crossing_probability_mc(o), std::invalid_argument);
}
