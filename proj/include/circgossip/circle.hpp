#pragma once

// Wrapped arithmetic on the circle [-pi, pi) and the edge-increment
// bookkeeping shared by every other module.
//
// Indexing: vertices and edges are 0-based in code. Edge e joins vertex e to
// vertex e+1 (and, on the ring, edge n-1 joins vertex n-1 to vertex 0). Logs
// and CLI output add 1 to match the usual 1-based numbering.

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace circgossip {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Representative of `a` in [-pi, pi): a - 2pi * floor((a + pi) / 2pi).
/// Values already in range are returned unchanged, so wrap_pi is idempotent
/// bit for bit and wrap_pi(pi) == -pi. Throws DomainError on non-finite input.
double wrap_pi(double a);

/// Circular distance |wrap_pi(a - b)|, in [0, pi].
double circular_distance(double a, double b);

/// 1-based cyclic index: 1 + ((i - 1) mod n) with a non-negative modulus.
std::size_t index_mod(std::int64_t i, std::size_t n);

/// 0-based cyclic index in [0, n).
inline std::size_t cyclic(std::int64_t i, std::size_t n) {
  const auto m = static_cast<std::int64_t>(n);
  const std::int64_t r = i % m;
  return static_cast<std::size_t>(r < 0 ? r + m : r);
}

/// True when s lies in the open principal interval (-pi, pi). This is the
/// no-branch-crossing predicate; -pi itself is excluded even though wrap_pi
/// can return it.
inline bool in_open_principal(double s) { return s > -kPi && s < kPi; }

enum class Boundary { OpenPath, Ring };

class Topology {
 public:
  Topology(Boundary kind, std::size_t n);

  static Topology open_path(std::size_t n) { return {Boundary::OpenPath, n}; }
  static Topology ring(std::size_t n) { return {Boundary::Ring, n}; }

  Boundary kind() const { return kind_; }
  bool is_ring() const { return kind_ == Boundary::Ring; }
  std::size_t vertex_count() const { return n_; }
  std::size_t edge_count() const { return is_ring() ? n_ : n_ - 1; }

  /// Left and right endpoints of edge e (0-based).
  std::size_t tail(std::size_t e) const { return e; }
  std::size_t head(std::size_t e) const { return e + 1 == n_ ? 0 : e + 1; }

  /// Throws std::out_of_range unless 0 <= e < edge_count().
  void check_edge(std::size_t e) const;

  bool operator==(const Topology&) const = default;

 private:
  Boundary kind_;
  std::size_t n_;
};

/// N angles in [-pi, pi) on a path or a ring.
class Configuration {
 public:
  /// Every angle must already be finite and inside [-pi, pi).
  Configuration(Topology topology, std::vector<double> angles);

  /// Wraps arbitrary finite reals into [-pi, pi) first.
  static Configuration wrapped(Topology topology, std::span<const double> raw);

  /// All vertices at `alpha` (wrapped).
  static Configuration consensus(Topology topology, double alpha);

  /// theta(i) = wrap_pi(offset + 2 pi w0 i / n), i = 0..n-1.
  static Configuration twisted(Topology topology, std::int64_t w0, double offset = 0.0);

  const Topology& topology() const { return topology_; }
  std::size_t size() const { return angles_.size(); }
  double operator[](std::size_t i) const { return angles_[i]; }
  std::span<const double> angles() const { return angles_; }

  /// Replaces one angle; `value` must be in [-pi, pi).
  void set(std::size_t i, double value);

  bool operator==(const Configuration&) const = default;

 private:
  Topology topology_;
  std::vector<double> angles_;
};

/// Edge increments in orientation order. Entries derived from a Configuration
/// lie in [-pi, pi); sweep-escape also uses this type for unwrapped values.
struct IncrementField {
  Topology topology;
  std::vector<double> deltas;
};

/// wrap_pi(theta(head) - theta(tail)) for edge e.
double wrapped_increment(const Configuration& cfg, std::size_t e);

IncrementField increment_field(const Configuration& cfg);

double total_increment(const IncrementField& field);

struct Winding {
  double raw = 0.0;                        ///< total increment / 2pi
  std::optional<std::int64_t> integer;     ///< set on the ring only
};

/// Default integrality tolerance for ring windings: 1e-9 * N.
inline double default_winding_tolerance(std::size_t n) { return 1e-9 * static_cast<double>(n); }

/// total_increment / 2pi. On the ring the raw value must be within
/// `tolerance` (default 1e-9 * N) of an integer, else ConsistencyError.
Winding winding_number(const IncrementField& field, std::optional<double> tolerance = std::nullopt);

/// Integer winding of a ring configuration (throws on an open path).
std::int64_t ring_winding(const Configuration& cfg);

}  // namespace circgossip
