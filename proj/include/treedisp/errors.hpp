#pragma once

#include <stdexcept>
#include <string>

namespace treedisp {

/// Input outside the mathematical domain of an operation (|λ| > 2√q, q < 2, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A structural property that must hold was found violated (band miscount,
/// non-monotone discriminant, ...).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace treedisp
