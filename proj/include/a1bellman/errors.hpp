#pragma once

#include <stdexcept>
#include <string>

namespace a1bellman {

/// A point, parameter, or construction request outside the admissible domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised by operations that need Q > 1 when the parameters have Q = 1.
class DegenerateError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The slope of f is two-sided only away from the nodes N^-k.
class NodePointError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A tree or a construction would exceed the configured depth cap.
class DepthCapError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Two trees with different fan-out were combined.
class IncompatibleTreesError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The exhaustive oracle refuses problems whose enumeration is too large.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace a1bellman
