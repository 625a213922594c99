#include "skewtorus/modes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "skewtorus/errors.hpp"

namespace skewtorus {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxRefineIters = 200;
constexpr double kHessStep = 1e-5;
constexpr int kRingPoints = 64;
constexpr int kMaxEscapes = 20;

struct Centred {
  const SkewModel& model;

  // log g and its gradient at the centred point y.
  double eval(const std::array<double, 2>& y, std::array<double, 2>& grad) const {
    const auto lambda = model.lambda();
    const double factor = 1.0 + lambda[0] * std::sin(y[0]) + lambda[1] * std::sin(y[1]);
    if (factor <= 0.0) {
      grad = {0.0, 0.0};
      return kNegInf;
    }
    const double lf = model.base().log_density_grad_y(y, grad);
    grad[0] += lambda[0] * std::cos(y[0]) / factor;
    grad[1] += lambda[1] * std::cos(y[1]) / factor;
    return lf + std::log(factor);
  }
};

std::array<double, 2> refine(const Centred& f, std::array<double, 2> y, double tol) {
  std::array<double, 2> g{};
  double v = f.eval(y, g);
  for (int it = 0; it < kMaxRefineIters; ++it) {
    if (std::hypot(g[0], g[1]) <= tol) break;
    std::array<double, 2> gp{}, gm{};
    double h[2][2];
    for (int k = 0; k < 2; ++k) {
      auto yp = y, ym = y;
      yp[static_cast<std::size_t>(k)] += kHessStep;
      ym[static_cast<std::size_t>(k)] -= kHessStep;
      f.eval(yp, gp);
      f.eval(ym, gm);
      h[0][k] = (gp[0] - gm[0]) / (2 * kHessStep);
      h[1][k] = (gp[1] - gm[1]) / (2 * kHessStep);
    }
    const double h01 = 0.5 * (h[0][1] + h[1][0]);
    const double det = h[0][0] * h[1][1] - h01 * h01;
    std::array<double, 2> step;
    if (h[0][0] < 0.0 && det > 0.0) {
      step = {-(h[1][1] * g[0] - h01 * g[1]) / det, -(h[0][0] * g[1] - h01 * g[0]) / det};
    } else {
      step = g;
    }
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      std::array<double, 2> yn{y[0] + t * step[0], y[1] + t * step[1]};
      std::array<double, 2> gn{};
      const double vn = f.eval(yn, gn);
      if (vn >= v) {
        y = yn;
        g = gn;
        v = vn;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return y;
}

// Returns a higher point on a small ring around y, if any. Grid scans and
// Newton steps can both stop on saddles whose descent direction falls
// between the stencil axes.
std::optional<std::array<double, 2>> higher_neighbour(const Centred& f, const std::array<double, 2>& y) {
  std::array<double, 2> g{};
  const double v = f.eval(y, g);
  const double slack = 1e-13 * (1.0 + std::abs(v));
  for (double radius : {1e-3, 1e-2}) {
    for (int k = 0; k < kRingPoints; ++k) {
      const double a = kTwoPi * k / kRingPoints;
      const std::array<double, 2> z{y[0] + radius * std::cos(a), y[1] + radius * std::sin(a)};
      if (f.eval(z, g) > v + slack) return z;
    }
  }
  return std::nullopt;
}

std::optional<std::array<double, 2>> climb(const Centred& f, std::array<double, 2> y, double tol) {
  for (int attempt = 0; attempt < kMaxEscapes; ++attempt) {
    y = refine(f, y, tol);
    const auto up = higher_neighbour(f, y);
    if (!up) return y;
    y = *up;
  }
  return std::nullopt;
}

std::vector<Mode> uniform_modes(const SkewModel& model) {
  const auto lambda = model.lambda();
  std::vector<double> point(2);
  std::vector<bool> ridge(2);
  for (std::size_t s = 0; s < 2; ++s) {
    ridge[s] = lambda[s] == 0.0;
    point[s] = model.mu()[s] + (ridge[s] ? 0.0 : std::copysign(kPi / 2, lambda[s]));
  }
  Mode m{TorusPoint(std::move(point)), 0.0, std::move(ridge)};
  m.density = std::exp(model.log_density(m.point));
  return {m};
}

}  // namespace

std::vector<Mode> find_modes(const SkewModel& model, const ModeSearchOptions& options) {
  if (model.dim() != 2) throw DimensionError("find_modes: bivariate model required");
  if (options.grid_n < 3) throw DomainError("find_modes: grid must have at least 3 points per axis");
  if (model.family() == Family::Uniform) return uniform_modes(model);

  const int n = options.grid_n;
  const auto un = static_cast<std::size_t>(n);
  std::vector<double> values(un * un);
  auto node = [n](int i) { return -kPi + kTwoPi * i / n; };
  const double lam0 = model.lambda()[0], lam1 = model.lambda()[1];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // scan in centred coordinates, so the base density needs no shift
      const double y[2] = {node(i), node(j)};
      const double factor = 1.0 + lam0 * std::sin(y[0]) + lam1 * std::sin(y[1]);
      values[static_cast<std::size_t>(i) * un + static_cast<std::size_t>(j)] =
          factor > 0.0 ? model.base().log_density(y) + std::log(factor) : kNegInf;
    }
  auto at = [&](int i, int j) {
    return values[static_cast<std::size_t>((i + n) % n) * un + static_cast<std::size_t>((j + n) % n)];
  };

  const Centred f{model};
  std::vector<Mode> modes;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = at(i, j);
      if (v == kNegInf) continue;
      bool is_max = true, all_equal = true;
      for (int di = -1; di <= 1 && is_max; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const double w = at(i + di, j + dj);
          if (w > v) {
            is_max = false;
            break;
          }
          if (w != v) all_equal = false;
        }
      if (!is_max || all_equal) continue;
      const auto y = climb(f, {node(i), node(j)}, options.refine_tol);
      if (!y) continue;
      TorusPoint point{model.mu()[0] + (*y)[0], model.mu()[1] + (*y)[1]};
      const double density = std::exp(model.log_density(point));
      bool merged = false;
      for (auto& m : modes) {
        if (torus_distance(m.point, point) <= options.merge_radius) {
          if (density > m.density) {
            m.point = point;
            m.density = density;
          }
          merged = true;
          break;
        }
      }
      if (!merged) modes.push_back(Mode{std::move(point), density, {false, false}});
    }
  std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) { return a.density > b.density; });
  return modes;
}

}  // namespace skewtorus
