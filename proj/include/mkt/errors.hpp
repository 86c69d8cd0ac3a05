#pragma once

#include <stdexcept>
#include <string>

namespace mkt {

/// Invalid user-supplied parameter (negative variance, c <= 0, N = 0, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a transform (real z, divergent series).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Iteration failed to converge, particles blew up, an integrator left its
/// admissible region.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Request exceeds what an algorithm is built to handle.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

}  // namespace mkt
