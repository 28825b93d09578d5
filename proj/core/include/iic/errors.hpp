#pragma once

#include <stdexcept>
#include <string>

namespace iic {

// Resource limits: radius too large, too many unrevealed sites for exact
// enumeration. The CLI maps this to exit code 2.
class CapacityExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotACircuit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Conditioning on a revealed configuration that cannot be extended to the
// one-arm event.
class IncompatibleConditioning : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RetryLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateFit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Exhausted : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Raised when a structural property of the coupling fails. These indicate a
// bug, never a statistical fluctuation.
class CircuitInvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace iic
