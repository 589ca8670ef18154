#pragma once

#include <stdexcept>
#include <string>

namespace circgossip {

/// Input outside the mathematical domain of an operation (non-finite angle,
/// neighbour sum beyond [-3pi/2, 3pi/2), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller broke a documented precondition, e.g. an antipodal update without a
/// midpoint choice.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An internal identity failed numerically: winding not integral on the ring,
/// Lyapunov increase, winding jump mismatch, lift invariant broken.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The co-moving frame was fed an update that leaves its winding sector.
class SectorViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace circgossip
