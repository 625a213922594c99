#pragma once

// Maps between optimiser variables and skewed models.
//
// Variables are mu (unbounded, wrapped on output), the family parameters
// (boxed) and a lambda block:
//   d = 1: a in [-1, 1], lambda = a
//   d = 2: (a, b) in [-1, 1]^2, lambda = ((a + b) / 2, (a - b) / 2), a linear
//          bijection from the square onto the l1 ball
//   d >= 3: lambda = lp - lm with lp, lm in [0, 1]^d and the linear
//          constraint sum(lp + lm) <= 1

#include <span>
#include <vector>

#include "skewtorus/families.hpp"
#include "skewtorus/skew.hpp"

namespace skewtorus::detail {

class ParameterMap {
 public:
  ParameterMap(Family family, int dim, bool skewed);

  Family family() const { return family_; }
  int dim() const { return dim_; }
  bool skewed() const { return skewed_; }
  std::size_t theta_count() const { return theta_count_; }
  /// Natural parameter count: d + theta + (skewed ? d : 0).
  std::size_t natural_count() const { return natural_count_; }
  std::size_t var_count() const { return var_count_; }
  bool needs_constraint() const { return skewed_ && dim_ >= 3; }

  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }

  SkewModel to_model(std::span<const double> v) const;
  std::vector<double> from_model(const SkewModel& model) const;

  /// Gradient in variables from a gradient in natural parameters.
  void chain(std::span<const double> natural_grad, std::span<double> var_grad) const;

  /// sum(lp + lm) - 1 for d >= 3.
  double constraint(std::span<const double> v, std::span<double> grad) const;

  /// True when a bounded variable sits within tol of its bound.
  bool on_boundary(std::span<const double> v, double tol) const;

  void clamp(std::span<double> v) const;

 private:
  Family family_;
  int dim_;
  bool skewed_;
  std::size_t theta_count_;
  std::size_t natural_count_;
  std::size_t var_count_;
  std::vector<double> lower_;
  std::vector<double> upper_;
};

}  // namespace skewtorus::detail
