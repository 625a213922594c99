#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace skewtorus::numerics {

inline constexpr int kMaxBesselOrder = 200;

/// Modified Bessel function of the first kind I_n(x) for integer n in
/// [0, 200] and x >= 0. Relative error below 1e-12 wherever the result is
/// representable. Throws DomainError outside that range.
double bessel_i(int order, double x);

/// log I_n(x); finite well past the overflow point of bessel_i. Returns -inf
/// for I_n(0) with n > 0.
double log_bessel_i(int order, double x);

/// exp(-x) I_k(x) for k = 0..max_order, by Miller's backward recurrence
/// normalised with exp(-x) (I_0 + 2 sum_k I_k) = 1. Never overflows; entries
/// far below exp(-x) I_0(x) may underflow to zero. max_order is not capped at
/// kMaxBesselOrder since normalising-constant series need long sequences.
std::vector<double> bessel_i_scaled_sequence(int max_order, double x);

/// Regularised lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);
/// Regularised upper incomplete gamma Q(a, x) = 1 - P(a, x), accurate in the tail.
double regularized_gamma_q(double a, double x);

double chi_square_cdf(double q, int df);
/// Upper tail probability P(X > q) for X ~ chi^2_df.
double chi_square_sf(double q, int df);
/// Quantile q with P(X <= q) = p; bracketed bisection on chi_square_cdf.
double chi_square_quantile(double p, int df);

/// Tensor-product equispaced grid on [-pi, pi)^d with equal weights
/// (2 pi / N)^d. For periodic integrands this is the trapezoidal rule and
/// converges geometrically for analytic integrands.
class QuadratureGrid {
 public:
  QuadratureGrid(int dim, int points_per_dim);

  /// Default resolution: N = 256 for d <= 2, N = 64 for d = 3, N = 24 above.
  static QuadratureGrid standard(int dim);

  int dim() const { return dim_; }
  int points_per_dim() const { return points_; }
  std::size_t size() const { return size_; }
  double weight() const { return weight_; }
  /// Node angle along one axis, index in [0, N).
  double axis_node(int index) const { return axis_[static_cast<std::size_t>(index)]; }
  std::span<const double> axis() const { return axis_; }

  /// Writes the coordinates of node `flat_index` into `out` (size dim).
  void node(std::size_t flat_index, std::span<double> out) const;

  /// Calls fn(point) for every node in row-major order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    std::vector<double> x(static_cast<std::size_t>(dim_));
    for (std::size_t i = 0; i < size_; ++i) {
      node(i, x);
      fn(std::span<const double>(x));
    }
  }

 private:
  int dim_;
  int points_;
  std::size_t size_;
  double weight_;
  std::vector<double> axis_;
};

using TorusIntegrand = std::function<double(std::span<const double>)>;

/// Trapezoidal estimate of the integral of f over the torus. Throws
/// IntegrationError if f is non-finite at any node.
double torus_integrate(const TorusIntegrand& f, const QuadratureGrid& grid);

/// Integrates `count` functions at once: f(x, out) must fill out[0..count).
std::vector<double> torus_integrate_many(
    std::size_t count,
    const std::function<void(std::span<const double>, std::span<double>)>& f,
    const QuadratureGrid& grid);

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

/// Composite Gauss-Legendre nodes/weights on [a, b] with `panels` panels of
/// `order` points each.
GaussRule composite_gauss_legendre(double a, double b, int panels, int order);

/// log(exp(a) + exp(b)) without overflow; handles -inf.
double log_add_exp(double a, double b);

}  // namespace skewtorus::numerics
