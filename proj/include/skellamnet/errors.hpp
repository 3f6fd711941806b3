#pragma once

#include <stdexcept>
#include <string>

namespace skellamnet {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Result is not representable (e.g. unscaled I_k(x) beyond DBL_MAX, or a
// point mass below the underflow guard).
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

// Requested rates cannot be realized on the given graph (alpha or beta > 1).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameters the routine does not support without an explicit opt-in.
class UnsupportedParameters : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative method failed (no convergence, invalid bracket, size guard).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace skellamnet
