#pragma once

// Reference computations used by the tests. They are written from the
// definitions with different numerics (long double, std::remainder, explicit
// powers, brute-force grids) and share no code with the library.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace oracle {

using real = long double;
// The circle is [-pi_d, pi_d) with pi_d the double nearest pi, so the
// oracle uses that value as its half-period while computing in long double.
inline constexpr real kPiL = static_cast<real>(std::numbers::pi);

/// Representative in [-pi, pi) via std::remainder.
inline real wrap(real x) {
  real r = std::remainder(x, 2 * kPiL);
  if (r >= kPiL) r -= 2 * kPiL;
  return r;
}

inline std::vector<real> increments(std::span<const double> theta, bool ring) {
  const std::size_t n = theta.size();
  std::vector<real> d;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    d.push_back(wrap(static_cast<real>(theta[i + 1]) - theta[i]));
  }
  if (ring) d.push_back(wrap(static_cast<real>(theta[0]) - theta[n - 1]));
  return d;
}

inline long long ring_winding(std::span<const double> theta) {
  real sum = 0;
  for (real d : increments(theta, true)) sum += d;
  return std::llround(sum / (2 * kPiL));
}

inline real l1(std::span<const double> theta, bool ring) {
  real sum = 0;
  for (real d : increments(theta, ring)) sum += std::fabs(d);
  return sum;
}

/// Probability that a midpoint update crosses a branch when the three
/// increments (X, Y, Z) around it are iid Unif[-pi, pi): midpoint rule on an
/// m x m x m grid. For fixed Y the events on X and Z are independent, so the
/// grid count factorizes as count_x(y) * count_z(y).
inline double crossing_probability_grid(int m) {
  const real h = 2 * kPiL / m;
  real no_cross = 0;
  for (int j = 0; j < m; ++j) {
    const real y = -kPiL + (j + 0.5L) * h;
    long inside = 0;
    for (int i = 0; i < m; ++i) {
      const real x = -kPiL + (i + 0.5L) * h;
      const real s = x + y / 2;
      if (s > -kPiL && s < kPiL) ++inside;
    }
    const real p = static_cast<real>(inside) / m;
    no_cross += p * p;
  }
  return static_cast<double>(1 - no_cross / m);
}

/// Closing entry after one cyclic sweep, from the explicit sum with powers.
inline real closing_after_sweep(std::span<const double> d) {
  const std::size_t n = d.size();
  real v = d[n - 1] + (0.5L + std::pow(2.0L, -static_cast<real>(n - 1))) * d[0];
  for (std::size_t j = 2; j <= n - 1; ++j) {
    v += std::pow(2.0L, -static_cast<real>(n - j)) * d[j - 1];
  }
  return v;
}

/// One cyclic sweep applied rule by rule on long doubles.
inline std::vector<real> sweep(std::vector<real> d) {
  const std::size_t n = d.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const real half = d[k] / 2;
    d[k] = 0;
    d[(k + n - 1) % n] += half;
    d[(k + 1) % n] += half;
  }
  return d;
}

}  // namespace oracle
