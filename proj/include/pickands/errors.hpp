#pragma once

#include <stdexcept>
#include <string>

namespace pickands {

/// Argument outside the mathematical domain of an operation (e.g. a <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Inputs are in-domain but violate an operation's stated precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A correlation equal to one at a positive lag makes a construction singular.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The optimizer's solved parameters leave their admissible box.
class ConstraintError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cholesky factorization failed even after the largest jitter.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sampling grid would exceed the enumeration cap.
class CappedGridError : public std::runtime_error {
 public:
  CappedGridError(const std::string& what, double log10_points)
      : std::runtime_error(what), log10_points_(log10_points) {}
  double log10_points() const noexcept { return log10_points_; }

 private:
  double log10_points_;
};

}  // namespace pickands
