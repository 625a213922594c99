#pragma once

#include <stdexcept>
#include <string>

namespace skewtorus {

/// Argument outside the mathematical domain of an operation (negative Bessel
/// argument, lambda outside the l1 ball, wrapped Cauchy kappa >= 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Dimensions of points, locations, skewness vectors or parameters disagree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A series, root finder or iterative scheme ran out of its iteration budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quadrature integrand produced a non-finite value.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A base sampler exceeded its proposal cap.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fitting could not produce any finite likelihood, or fits are inconsistent.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace skewtorus
