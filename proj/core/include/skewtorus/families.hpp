#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace skewtorus {

enum class Family { Uniform, Sine, Cosine, WrappedCauchy };

std::string_view family_name(Family family);
/// Accepts "uniform", "sine", "cosine", "wc" / "wrapped_cauchy".
Family parse_family(std::string_view name);

/// Number of off-diagonal dependence parameters for dimension d.
constexpr std::size_t dependence_count(int dim) {
  return dim < 2 ? 0 : static_cast<std::size_t>(dim * (dim - 1) / 2);
}

/// Parameters of a pointwise-symmetric base density centred at the origin.
///
/// Layout of the flattened parameter vector (values()):
///   kappa_1..kappa_d, then dependence terms.
/// For d = 2 the single dependence term is the bivariate r of the Sine,
/// Cosine or wrapped Cauchy density. For d >= 3 (Sine/Cosine only) the terms
/// are R_12, R_13, ..., R_{d-1,d} of the symmetric zero-diagonal matrix R.
/// For d = 1 Sine and Cosine both reduce to the von Mises density.
class FamilyParams {
 public:
  static FamilyParams uniform(int dim);
  static FamilyParams sine(std::vector<double> kappa, std::vector<double> dep = {});
  static FamilyParams cosine(std::vector<double> kappa, std::vector<double> dep = {});
  static FamilyParams wrapped_cauchy(double kappa1, double kappa2, double r);
  /// Build from a flattened parameter vector (see class comment).
  static FamilyParams from_values(Family family, int dim, std::span<const double> values);

  Family family() const { return family_; }
  int dim() const { return dim_; }
  std::span<const double> kappa() const { return kappa_; }
  std::span<const double> dep() const { return dep_; }
  /// Bivariate dependence parameter; requires dim() == 2.
  double r() const;

  std::size_t num_values() const { return kappa_.size() + dep_.size(); }
  std::vector<double> values() const;

  friend bool operator==(const FamilyParams&, const FamilyParams&) = default;

 private:
  FamilyParams(Family family, int dim, std::vector<double> kappa, std::vector<double> dep);

  Family family_ = Family::Uniform;
  int dim_ = 0;
  std::vector<double> kappa_;
  std::vector<double> dep_;
};

/// Coefficients of the bivariate wrapped Cauchy denominator
/// c0 - c1 cos y1 - c2 cos y2 - c3 cos y1 cos y2 - c4 sin y1 sin y2.
struct WCCoefficients {
  double c0 = 0;
  double c1 = 0;
  double c2 = 0;
  double c3 = 0;
  double c4 = 0;

  double denominator(double y1, double y2) const;
};

/// Requires kappa_s in [0, 1) and |r| < 1. Note |r| in c0..c3, signed r in c4.
WCCoefficients wc_coefficients(double kappa1, double kappa2, double r);

/// log C for the bivariate Sine density exp(k1 cos y1 + k2 cos y2 + r sin y1 sin y2) / C.
double sine_log_norm_const(double kappa1, double kappa2, double r);
/// log C for the bivariate Cosine density exp(k1 cos y1 + k2 cos y2 + r cos(y1 - y2)) / C.
double cosine_log_norm_const(double kappa1, double kappa2, double r);

/// log C together with its gradient, which for these exponent families equals
/// the expected sufficient statistics E[T(Y)].
struct LogNormConst {
  double value = 0;
  std::vector<double> grad;
};
LogNormConst sine_log_norm_const_grad(double kappa1, double kappa2, double r);
LogNormConst cosine_log_norm_const_grad(double kappa1, double kappa2, double r);

/// Normalising constant for any Sine/Cosine parameter set (d = 1, 2 by series,
/// d >= 3 by memoised tensor quadrature).
LogNormConst exponent_log_norm_const(const FamilyParams& params);

/// Evaluator for log f(y; theta) with the normalising constant precomputed.
/// y is the centred point x - mu; any real coordinates are accepted since the
/// densities depend on y only through sines and cosines.
class BaseDensity {
 public:
  explicit BaseDensity(FamilyParams params);

  const FamilyParams& params() const { return params_; }
  int dim() const { return params_.dim(); }

  double log_density(std::span<const double> y) const;

  /// Returns log f(y) and writes d/dy log f(y) into grad_y (size dim).
  double log_density_grad_y(std::span<const double> y, std::span<double> grad_y) const;

  /// d/dtheta log f(y) in values() order. Analytic for Uniform/Sine/Cosine,
  /// central differences (step 1e-5, shrunk near the
  /// parameter boundary) for the wrapped Cauchy.
  void grad_theta(std::span<const double> y, std::span<double> out) const;

  /// Sufficient statistics T(y) of the Sine/Cosine exponent kappa.T(y).
  void sufficient_stats(std::span<const double> y, std::span<double> out) const;

  /// log C (Sine/Cosine) or log of the constant prefactor (Uniform, wrapped Cauchy).
  double log_norm_const() const { return log_norm_.value; }

 private:
  double exponent(std::span<const double> y) const;
  double wc_log_density(const WCCoefficients& c, double log_prefactor,
                        std::span<const double> y) const;

  FamilyParams params_;
  LogNormConst log_norm_;
  WCCoefficients wc_{};
  // Perturbed wrapped Cauchy coefficients for central differences in theta:
  // index 2k is theta_k + h, 2k + 1 is theta_k - h.
  std::array<WCCoefficients, 6> wc_perturbed_{};
  std::array<double, 6> wc_perturbed_log_prefactor_{};
  std::array<double, 3> wc_step_{};
};

/// log f(x; theta) for a point x centred at the origin.
double base_log_density(const FamilyParams& params, std::span<const double> x);

enum class Modality { Unimodal, Multimodal, Unknown };
std::string_view modality_name(Modality m);

/// Known modality of the symmetric bivariate base density. Throws
/// DimensionError for d != 2.
Modality base_is_unimodal(const FamilyParams& params);

/// Univariate von Mises log density at y (centred).
double von_mises_log_density(double kappa, double y);
/// Univariate wrapped Cauchy log density with concentration rho in [0, 1).
double wrapped_cauchy_log_density(double rho, double y);

}  // namespace skewtorus
