#pragma once

#include <functional>
#include <span>
#include <vector>

namespace skewtorus::opt {

/// Returns f(x) (+inf marks an infeasible/zero-likelihood point) and writes
/// the gradient into grad whenever f is finite.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

/// Smooth inequality constraint c(x) <= 0 with gradient.
using Constraint = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct BoxOptions {
  int max_iters = 500;
  /// Stop when the relative change in f stays below ftol for 3 iterations.
  double ftol = 1e-8;
  /// Stop when the projected gradient infinity-norm drops below gtol.
  double gtol = 1e-7;
};

struct OptResult {
  std::vector<double> x;
  double f = 0;
  std::vector<double> grad;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Projected quasi-Newton (BFGS on the free variables, projected Armijo
/// backtracking) for l <= x <= u. Infinite bounds are allowed. Every iterate
/// is feasible and f decreases monotonically.
OptResult minimize_box(const Objective& objective, std::vector<double> x0,
                       std::span<const double> lower, std::span<const double> upper,
                       const BoxOptions& options = {});

/// Augmented Lagrangian outer loop around minimize_box for extra
/// inequality constraints. The returned point satisfies every constraint to
/// within `feasibility_tol`.
OptResult minimize_augmented_lagrangian(const Objective& objective, std::vector<double> x0,
                                        std::span<const double> lower,
                                        std::span<const double> upper,
                                        const std::vector<Constraint>& constraints,
                                        const BoxOptions& options = {},
                                        double feasibility_tol = 1e-9);

/// Projected-gradient infinity norm.
double projected_gradient_norm(std::span<const double> x, std::span<const double> grad,
                               std::span<const double> lower, std::span<const double> upper);

}  // namespace skewtorus::opt
