#include "skewtorus/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skewtorus/errors.hpp"

namespace skewtorus::opt {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 50;
constexpr int kStallIters = 3;

void project(std::span<double> x, std::span<const double> lower, std::span<const double> upper) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
}

bool is_active(double x, double g, double lo, double hi) {
  return (x <= lo && g > 0.0) || (x >= hi && g < 0.0);
}

}  // namespace

double projected_gradient_norm(std::span<const double> x, std::span<const double> grad,
                               std::span<const double> lower, std::span<const double> upper) {
  double norm = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double step = std::clamp(x[i] - grad[i], lower[i], upper[i]) - x[i];
    norm = std::max(norm, std::abs(step));
  }
  return norm;
}

OptResult minimize_box(const Objective& objective, std::vector<double> x0, std::span<const double> lower,
                       std::span<const double> upper, const BoxOptions& options) {
  const std::size_t n = x0.size();
  if (lower.size() != n || upper.size() != n) throw DimensionError("minimize_box: bound sizes differ from x0");
  for (std::size_t i = 0; i < n; ++i)
    if (!(lower[i] <= upper[i])) throw DomainError("minimize_box: lower bound above upper bound");

  OptResult res;
  res.x = std::move(x0);
  project(res.x, lower, upper);
  res.grad.assign(n, 0.0);
  res.f = objective(res.x, res.grad);
  res.evaluations = 1;
  if (!std::isfinite(res.f)) return res;

  // inverse Hessian approximation, row-major
  std::vector<double> h(n * n, 0.0);
  auto reset = [&] {
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) h[i * n + i] = 1.0;
  };
  reset();
  bool identity = true;
  int stall = 0;
  std::vector<double> p(n), xn(n), gn(n), s(n), y(n), hy(n);

  for (int it = 0; it < options.max_iters; ++it) {
    res.iterations = it + 1;
    if (projected_gradient_norm(res.x, res.grad, lower, upper) <= options.gtol) {
      res.converged = true;
      return res;
    }
    bool accepted = false;
    double fn = 0;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      std::vector<bool> active(n);
      for (std::size_t i = 0; i < n; ++i) active[i] = is_active(res.x[i], res.grad[i], lower[i], upper[i]);
      double slope = 0;
      for (std::size_t i = 0; i < n; ++i) {
        p[i] = 0;
        if (active[i]) continue;
        for (std::size_t j = 0; j < n; ++j)
          if (!active[j]) p[i] -= h[i * n + j] * res.grad[j];
        slope += p[i] * res.grad[i];
      }
      if (!(slope < 0.0)) {
        reset();
        identity = true;
        for (std::size_t i = 0; i < n; ++i) p[i] = active[i] ? 0.0 : -res.grad[i];
      }
      double t = 1.0;
      if (identity) {
        double gnorm = 0;
        for (double v : p) gnorm = std::max(gnorm, std::abs(v));
        if (gnorm > 1.0) t = 1.0 / gnorm;
      }
      for (int ls = 0; ls < kMaxBacktracks; ++ls, t *= 0.5) {
        for (std::size_t i = 0; i < n; ++i) xn[i] = res.x[i] + t * p[i];
        project(xn, lower, upper);
        double decrease = 0;
        for (std::size_t i = 0; i < n; ++i) decrease += res.grad[i] * (xn[i] - res.x[i]);
        if (decrease >= 0.0) continue;
        fn = objective(xn, gn);
        ++res.evaluations;
        if (std::isfinite(fn) && fn <= res.f + kArmijo * decrease) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (identity) break;
        reset();
        identity = true;
      }
    }
    if (!accepted) {
      // no further decrease at working precision
      res.converged = projected_gradient_norm(res.x, res.grad, lower, upper) <= std::max(options.gtol, 1e-5);
      return res;
    }

    double sy = 0, snorm = 0, ynorm = 0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - res.x[i];
      y[i] = gn[i] - res.grad[i];
      sy += s[i] * y[i];
      snorm += s[i] * s[i];
      ynorm += y[i] * y[i];
    }
    if (sy > 1e-10 * std::sqrt(snorm * ynorm)) {
      if (identity) {
        // scale the initial matrix before the first update
        const double gamma = sy / ynorm;
        for (std::size_t i = 0; i < n; ++i) h[i * n + i] = gamma;
      }
      double yhy = 0;
      for (std::size_t i = 0; i < n; ++i) {
        hy[i] = 0;
        for (std::size_t j = 0; j < n; ++j) hy[i] += h[i * n + j] * y[j];
        yhy += y[i] * hy[i];
      }
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
      identity = false;
    }

    const double change = std::abs(res.f - fn) / std::max(1.0, std::abs(res.f));
    res.x = xn;
    res.grad = gn;
    res.f = fn;
    stall = change <= options.ftol ? stall + 1 : 0;
    if (stall >= kStallIters) {
      res.converged = true;
      return res;
    }
  }
  res.converged = projected_gradient_norm(res.x, res.grad, lower, upper) <= options.gtol;
  return res;
}

OptResult minimize_augmented_lagrangian(const Objective& objective, std::vector<double> x0,
                                        std::span<const double> lower, std::span<const double> upper,
                                        const std::vector<Constraint>& constraints,
                                        const BoxOptions& options, double feasibility_tol) {
  if (constraints.empty()) return minimize_box(objective, std::move(x0), lower, upper, options);
  const std::size_t n = x0.size();
  const std::size_t m = constraints.size();
  std::vector<double> nu(m, 0.0);
  double penalty = 10.0;
  std::vector<double> cg(n);
  auto max_violation = [&](std::span<const double> x) {
    double v = 0;
    for (const auto& c : constraints) v = std::max(v, c(x, cg));
    return v;
  };

  OptResult best;
  std::vector<double> x = std::move(x0);
  double last_violation = std::numeric_limits<double>::infinity();
  int total_evals = 0, total_iters = 0;
  for (int outer = 0; outer < 40; ++outer) {
    Objective merit = [&](std::span<const double> z, std::span<double> grad) {
      const double f = objective(z, grad);
      if (!std::isfinite(f)) return f;
      double total = f;
      for (std::size_t j = 0; j < m; ++j) {
        const double c = constraints[j](z, cg);
        const double shifted = nu[j] + penalty * c;
        if (shifted > 0.0) {
          total += (shifted * shifted - nu[j] * nu[j]) / (2.0 * penalty);
          for (std::size_t i = 0; i < n; ++i) grad[i] += shifted * cg[i];
        } else {
          total -= nu[j] * nu[j] / (2.0 * penalty);
        }
      }
      return total;
    };
    OptResult inner = minimize_box(merit, x, lower, upper, options);
    total_evals += inner.evaluations;
    total_iters += inner.iterations;
    x = inner.x;
    const double violation = max_violation(x);
    for (std::size_t j = 0; j < m; ++j) nu[j] = std::max(0.0, nu[j] + penalty * constraints[j](x, cg));
    if (violation <= feasibility_tol && inner.converged) {
      best = inner;
      best.converged = true;
      break;
    }
    if (violation > 0.25 * last_violation) penalty *= 10.0;
    last_violation = violation;
    best = inner;
    best.converged = false;
  }
  best.x = x;
  best.grad.assign(n, 0.0);
  best.f = objective(best.x, best.grad);
  best.evaluations = total_evals + 1;
  best.iterations = total_iters;
  if (max_violation(best.x) > feasibility_tol) best.converged = false;
  return best;
}

}  // namespace skewtorus::opt
