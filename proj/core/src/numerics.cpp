#include "skewtorus/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "skewtorus/angles.hpp"
#include "skewtorus/errors.hpp"

namespace skewtorus::numerics {

namespace {

constexpr double kSeriesLimit = 500.0;

void check_bessel_args(int order, double x) {
  if (order < 0 || order > kMaxBesselOrder)
    throw DomainError("bessel_i: order must lie in [0, 200], got " + std::to_string(order));
  if (!(x >= 0.0) || !std::isfinite(x))
    throw DomainError("bessel_i: argument must be finite and non-negative");
}

// sum_k r_k with r_0 = 1, r_{k+1} = r_k (x/2)^2 / ((k+1)(k+1+n)); all terms
// positive so the relative error is a few ulps per term.
double bessel_series_ratio_sum(int order, double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < 5000; ++k) {
    term *= q / ((k + 1.0) * (k + 1.0 + order));
    sum += term;
    if (term < 1e-17 * sum && k + 1 > 0.5 * x) return sum;
  }
  throw ConvergenceError("bessel_i: power series did not converge");
}

}  // namespace

double bessel_i(int order, double x) {
  check_bessel_args(order, x);
  if (x == 0.0) return order == 0 ? 1.0 : 0.0;
  if (x <= kSeriesLimit) {
    double lead = 1.0;
    const double half = 0.5 * x;
    for (int j = 1; j <= order; ++j) lead *= half / j;
    return lead * bessel_series_ratio_sum(order, x);
  }
  return std::exp(log_bessel_i(order, x));
}

double log_bessel_i(int order, double x) {
  check_bessel_args(order, x);
  if (x == 0.0) return order == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (x <= kSeriesLimit) {
    const double log_lead = order * std::log(0.5 * x) - std::lgamma(order + 1.0);
    return log_lead + std::log(bessel_series_ratio_sum(order, x));
  }
  const auto seq = bessel_i_scaled_sequence(order, x);
  return std::log(seq[static_cast<std::size_t>(order)]) + x;
}

std::vector<double> bessel_i_scaled_sequence(int max_order, double x) {
  if (max_order < 0) throw DomainError("bessel_i_scaled_sequence: negative order");
  if (!(x >= 0.0) || !std::isfinite(x))
    throw DomainError("bessel_i_scaled_sequence: argument must be finite and non-negative");
  std::vector<double> out(static_cast<std::size_t>(max_order) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (x < 1.0) {
    // Backward recurrence steps grow like 2k/x; the series is cheap and exact here.
    const double scale = std::exp(-x);
    double lead = 1.0;
    for (int k = 0; k <= max_order; ++k) {
      if (k > 0) lead *= 0.5 * x / k;
      if (lead == 0.0) break;
      out[static_cast<std::size_t>(k)] = scale * lead * bessel_series_ratio_sum(k, x);
    }
    return out;
  }
  const int m = std::max(max_order, static_cast<int>(std::ceil(x)));
  const int start = 2 * (m + static_cast<int>(std::sqrt(40.0 * m))) + 20;
  constexpr double kBig = 1e250;
  constexpr double kSmall = 1e-250;
  double above = 0.0;  // I_{k+1}
  double current = 1e-300;  // I_k, arbitrary scale
  double sum = 0.0;
  for (int k = start; k >= 1; --k) {
    const double below = above + (2.0 * k / x) * current;  // I_{k-1}
    above = current;
    current = below;
    if (k <= max_order) out[static_cast<std::size_t>(k)] = above;
    sum += 2.0 * above;
    if (current > kBig) {
      current *= kSmall;
      above *= kSmall;
      sum *= kSmall;
      for (int j = k; j <= max_order; ++j) out[static_cast<std::size_t>(j)] *= kSmall;
    }
  }
  out[0] = current;
  sum += current;
  for (double& v : out) v /= sum;
  return out;
}

namespace {

double gamma_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < 10000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw ConvergenceError("incomplete gamma series did not converge");
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_continued_fraction(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
  }
  throw ConvergenceError("incomplete gamma continued fraction did not converge");
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || !std::isfinite(a))
    throw DomainError("incomplete gamma: need a > 0 and x >= 0");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_series(a, x);
  return gamma_continued_fraction(a, x);
}

double chi_square_cdf(double q, int df) {
  if (df <= 0) throw DomainError("chi-square: df must be positive");
  if (q <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * df, 0.5 * q);
}

double chi_square_sf(double q, int df) {
  if (df <= 0) throw DomainError("chi-square: df must be positive");
  if (q <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * df, 0.5 * q);
}

double chi_square_quantile(double p, int df) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("chi_square_quantile: p must lie in (0, 1)");
  if (df <= 0) throw DomainError("chi_square_quantile: df must be positive");
  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(df));
  while (chi_square_cdf(hi, df) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) throw ConvergenceError("chi_square_quantile: bracket failed");
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (chi_square_cdf(mid, df) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-14 * hi) break;
  }
  return 0.5 * (lo + hi);
}

QuadratureGrid::QuadratureGrid(int dim, int points_per_dim) : dim_(dim), points_(points_per_dim) {
  if (dim < 1) throw DomainError("QuadratureGrid: dimension must be positive");
  if (points_per_dim < 1) throw DomainError("QuadratureGrid: points per dimension must be positive");
  size_ = 1;
  for (int i = 0; i < dim; ++i) size_ *= static_cast<std::size_t>(points_per_dim);
  weight_ = std::pow(kTwoPi / points_per_dim, dim);
  axis_.resize(static_cast<std::size_t>(points_per_dim));
  for (int j = 0; j < points_per_dim; ++j)
    axis_[static_cast<std::size_t>(j)] = -kPi + kTwoPi * j / points_per_dim;
}

QuadratureGrid QuadratureGrid::standard(int dim) {
  if (dim <= 2) return QuadratureGrid(dim, 256);
  if (dim == 3) return QuadratureGrid(dim, 64);
  return QuadratureGrid(dim, 24);
}

void QuadratureGrid::node(std::size_t flat_index, std::span<double> out) const {
  const auto n = static_cast<std::size_t>(points_);
  for (int s = dim_ - 1; s >= 0; --s) {
    out[static_cast<std::size_t>(s)] = axis_[flat_index % n];
    flat_index /= n;
  }
}

double torus_integrate(const TorusIntegrand& f, const QuadratureGrid& grid) {
  double sum = 0.0;
  double compensation = 0.0;
  grid.for_each([&](std::span<const double> x) {
    const double v = f(x);
    if (!std::isfinite(v)) throw IntegrationError("torus_integrate: non-finite integrand value");
    const double y = v - compensation;
    const double t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
  });
  return sum * grid.weight();
}

std::vector<double> torus_integrate_many(
    std::size_t count,
    const std::function<void(std::span<const double>, std::span<double>)>& f,
    const QuadratureGrid& grid) {
  std::vector<double> sums(count, 0.0);
  std::vector<double> values(count, 0.0);
  grid.for_each([&](std::span<const double> x) {
    f(x, values);
    for (std::size_t k = 0; k < count; ++k) {
      if (!std::isfinite(values[k]))
        throw IntegrationError("torus_integrate_many: non-finite integrand value");
      sums[k] += values[k];
    }
  });
  for (double& s : sums) s *= grid.weight();
  return sums;
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -z;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = z;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return rule;
}

GaussRule composite_gauss_legendre(double a, double b, int panels, int order) {
  const GaussRule base = gauss_legendre(order);
  GaussRule out;
  if (panels < 1 || b <= a) return out;
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    for (std::size_t j = 0; j < base.nodes.size(); ++j) {
      out.nodes.push_back(mid + 0.5 * width * base.nodes[j]);
      out.weights.push_back(0.5 * width * base.weights[j]);
    }
  }
  return out;
}

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

}  // namespace skewtorus::numerics
