#pragma once

#include <stdexcept>
#include <string>

namespace bpkpz {

/// Argument outside the mathematical domain of a function (e.g. digamma at x <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Parameter vectors violate an ordering constraint such as max(b) < min(beta).
class ConstraintError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A contour construction failed its separation check.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quadrature node landed within tolerance of an integrand singularity.
class PoleProximityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense factorization broke down or a self-convergence check failed.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bpkpz
