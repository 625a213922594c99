#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "skewtorus/optimizer.hpp"

namespace opt = skewtorus::opt;

TEST(BoxOptimizer, QuadraticWithActiveBound) {
  // minimum of (x-2)^2 + (y+1)^2 over [0, 1] x [-5, 5] is (1, -1)
  const opt::Objective f = [](std::span<const double> x, std::span<double> g) {
    g[0] = 2 * (x[0] - 2);
    g[1] = 2 * (x[1] + 1);
    return (x[0] - 2) * (x[0] - 2) + (x[1] + 1) * (x[1] + 1);
  };
  const double lo[2] = {0, -5}, hi[2] = {1, 5};
  const auto r = opt::minimize_box(f, {0.5, 3}, lo, hi);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-12);
  EXPECT_NEAR(r.x[1], -1.0, 1e-6);
  EXPECT_NEAR(opt::projected_gradient_norm(r.x, r.grad, lo, hi), 0.0, 1e-6);
}

TEST(BoxOptimizer, Rosenbrock) {
  const opt::Objective f = [](std::span<const double> x, std::span<double> g) {
    const double a = 1 - x[0], b = x[1] - x[0] * x[0];
    g[0] = -2 * a - 400 * x[0] * b;
    g[1] = 200 * b;
    return a * a + 100 * b * b;
  };
  const double inf = std::numeric_limits<double>::infinity();
  const double lo[2] = {-inf, -inf}, hi[2] = {inf, inf};
  opt::BoxOptions o;
  o.max_iters = 2000;
  o.ftol = 1e-15;
  o.gtol = 1e-9;
  const auto r = opt::minimize_box(f, {-1.2, 1}, lo, hi, o);
  EXPECT_NEAR(r.x[0], 1.0, 1e-5);
  EXPECT_NEAR(r.x[1], 1.0, 1e-5);
}

TEST(BoxOptimizer, MonotoneAndFeasible) {
  int calls = 0;
  const opt::Objective f = [&](std::span<const double> x, std::span<double> g) {
    ++calls;
    // infeasible region reported as +inf
    if (x[0] + x[1] > 1.5) return std::numeric_limits<double>::infinity();
    g[0] = std::sin(x[0]) + 2 * x[0];
    g[1] = 4 * (x[1] - 0.3);
    return -std::cos(x[0]) + x[0] * x[0] + 2 * (x[1] - 0.3) * (x[1] - 0.3);
  };
  const double lo[2] = {-1, -1}, hi[2] = {1, 1};
  const auto r = opt::minimize_box(
      [&](std::span<const double> x, std::span<double> g) {
        EXPECT_GE(x[0], -1);
        EXPECT_LE(x[0], 1);
        return f(x, g);
      },
      {0.9, -0.9}, lo, hi);
  EXPECT_NEAR(r.x[0], 0.0, 1e-5);
  EXPECT_NEAR(r.x[1], 0.3, 1e-5);
  EXPECT_GT(r.evaluations, 0);
}

TEST(AugmentedLagrangian, L1Ball) {
  // maximise a linear function over |x| + |y| <= 1 written as x+ - x- parts
  // variables (p1, m1, p2, m2) in [0, 1], x = p - m, constraint sum p + m <= 1
  const opt::Objective f = [](std::span<const double> v, std::span<double> g) {
    const double x = v[0] - v[1], y = v[2] - v[3];
    const double val = -(0.3 * x + 0.8 * y) + 0.05 * (x * x + y * y);
    const double gx = -0.3 + 0.1 * x, gy = -0.8 + 0.1 * y;
    g[0] = gx;
    g[1] = -gx;
    g[2] = gy;
    g[3] = -gy;
    return val;
  };
  const opt::Constraint c = [](std::span<const double> v, std::span<double> g) {
    for (int i = 0; i < 4; ++i) g[i] = 1;
    return v[0] + v[1] + v[2] + v[3] - 1;
  };
  const double lo[4] = {0, 0, 0, 0}, hi[4] = {1, 1, 1, 1};
  const auto r = opt::minimize_augmented_lagrangian(f, {0.1, 0.1, 0.1, 0.1}, lo, hi, {c});
  const double x = r.x[0] - r.x[1], y = r.x[2] - r.x[3];
  EXPECT_LE(r.x[0] + r.x[1] + r.x[2] + r.x[3], 1 + 1e-9);
  EXPECT_NEAR(x, 0.0, 1e-4);
  EXPECT_NEAR(y, 1.0, 1e-4);
}
