#include "skewtorus/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "skewtorus/angles.hpp"
#include "skewtorus/errors.hpp"
#include "skewtorus/numerics.hpp"

namespace skewtorus {

namespace {

constexpr double kLog4Pi2 = 3.6757541328186907;  // log(4 pi^2)
constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kSeriesRelTol = 1e-14;
constexpr int kMaxSeriesTerms = 500;
constexpr double kSineQuadratureRatio = 1e3;
constexpr double kWcStep = 1e-5;

std::size_t pair_index(int i, int j, int dim) {
  return static_cast<std::size_t>(i * dim - i * (i + 1) / 2 + (j - i - 1));
}

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw DomainError(std::string(what) + ": parameters must be finite");
}

// Sufficient statistics of the Sine/Cosine exponent theta . T(y).
void exponent_stats(Family family, int dim, std::span<const double> y, std::span<double> t) {
  for (int s = 0; s < dim; ++s) t[static_cast<std::size_t>(s)] = std::cos(y[static_cast<std::size_t>(s)]);
  if (dim == 2) {
    t[2] = family == Family::Sine ? std::sin(y[0]) * std::sin(y[1]) : std::cos(y[0] - y[1]);
    return;
  }
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      const auto yi = y[static_cast<std::size_t>(i)];
      const auto yj = y[static_cast<std::size_t>(j)];
      const double v = family == Family::Sine ? std::sin(yi) * std::sin(yj) : std::cos(yi - yj);
      t[static_cast<std::size_t>(dim) + pair_index(i, j, dim)] = 2.0 * v;
    }
}

LogNormConst exponent_quadrature(Family family, int dim, std::span<const double> theta) {
  const auto grid = numerics::QuadratureGrid::standard(dim);
  double shift = 0;
  for (std::size_t k = 0; k < theta.size(); ++k)
    shift += std::abs(theta[k]) * (dim >= 3 && k >= static_cast<std::size_t>(dim) ? 2.0 : 1.0);
  const std::size_t m = theta.size();
  std::vector<double> t(m);
  double z = 0;
  std::vector<double> moments(m, 0.0);
  grid.for_each([&](std::span<const double> y) {
    exponent_stats(family, dim, y, t);
    double e = 0;
    for (std::size_t k = 0; k < m; ++k) e += theta[k] * t[k];
    const double w = std::exp(e - shift);
    z += w;
    for (std::size_t k = 0; k < m; ++k) moments[k] += w * t[k];
  });
  LogNormConst out;
  out.value = shift + std::log(z * grid.weight());
  out.grad.resize(m);
  for (std::size_t k = 0; k < m; ++k) out.grad[k] = moments[k] / z;
  return out;
}

void check_exponent_args(double kappa1, double kappa2, double r) {
  if (!(kappa1 >= 0.0) || !(kappa2 >= 0.0) || !std::isfinite(kappa1) || !std::isfinite(kappa2))
    throw DomainError("normalising constant: kappa must be finite and non-negative");
  if (!std::isfinite(r)) throw DomainError("normalising constant: r must be finite");
}

LogNormConst independent_log_norm_const(double kappa1, double kappa2) {
  const auto a = numerics::bessel_i_scaled_sequence(1, kappa1);
  const auto b = numerics::bessel_i_scaled_sequence(1, kappa2);
  LogNormConst out;
  out.value = kLog4Pi2 + kappa1 + std::log(a[0]) + kappa2 + std::log(b[0]);
  out.grad = {a[1] / a[0], b[1] / b[0], 0.0};
  return out;
}

}  // namespace

std::string_view family_name(Family family) {
  switch (family) {
    case Family::Uniform: return "uniform";
    case Family::Sine: return "sine";
    case Family::Cosine: return "cosine";
    case Family::WrappedCauchy: return "wc";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "uniform") return Family::Uniform;
  if (name == "sine") return Family::Sine;
  if (name == "cosine") return Family::Cosine;
  if (name == "wc" || name == "wrapped_cauchy") return Family::WrappedCauchy;
  throw DomainError("unknown family '" + std::string(name) + "'");
}

FamilyParams::FamilyParams(Family family, int dim, std::vector<double> kappa, std::vector<double> dep)
    : family_(family), dim_(dim), kappa_(std::move(kappa)), dep_(std::move(dep)) {}

FamilyParams FamilyParams::uniform(int dim) {
  if (dim < 1) throw DimensionError("uniform: dimension must be positive");
  return FamilyParams(Family::Uniform, dim, {}, {});
}

namespace {

void check_exponent_family(const char* name, const std::vector<double>& kappa,
                           const std::vector<double>& dep) {
  const int dim = static_cast<int>(kappa.size());
  if (dim < 1) throw DimensionError(std::string(name) + ": need at least one concentration");
  if (dep.size() != dependence_count(dim))
    throw DimensionError(std::string(name) + ": expected " + std::to_string(dependence_count(dim)) +
                         " dependence parameters for d = " + std::to_string(dim));
  check_finite(kappa, name);
  check_finite(dep, name);
  for (double k : kappa)
    if (k < 0.0) throw DomainError(std::string(name) + ": kappa must be non-negative");
}

}  // namespace

FamilyParams FamilyParams::sine(std::vector<double> kappa, std::vector<double> dep) {
  check_exponent_family("sine", kappa, dep);
  const int dim = static_cast<int>(kappa.size());
  return FamilyParams(Family::Sine, dim, std::move(kappa), std::move(dep));
}

FamilyParams FamilyParams::cosine(std::vector<double> kappa, std::vector<double> dep) {
  check_exponent_family("cosine", kappa, dep);
  const int dim = static_cast<int>(kappa.size());
  return FamilyParams(Family::Cosine, dim, std::move(kappa), std::move(dep));
}

FamilyParams FamilyParams::wrapped_cauchy(double kappa1, double kappa2, double r) {
  if (!(kappa1 >= 0.0 && kappa1 < 1.0) || !(kappa2 >= 0.0 && kappa2 < 1.0))
    throw DomainError("wrapped Cauchy: kappa must lie in [0, 1)");
  if (!(std::abs(r) < 1.0)) throw DomainError("wrapped Cauchy: |r| must be < 1");
  return FamilyParams(Family::WrappedCauchy, 2, {kappa1, kappa2}, {r});
}

FamilyParams FamilyParams::from_values(Family family, int dim, std::span<const double> values) {
  const auto nk = static_cast<std::size_t>(dim);
  switch (family) {
    case Family::Uniform:
      if (!values.empty()) throw DimensionError("uniform: takes no parameters");
      return uniform(dim);
    case Family::Sine:
    case Family::Cosine: {
      if (dim < 1 || values.size() != nk + dependence_count(dim))
        throw DimensionError("from_values: wrong number of parameters");
      std::vector<double> kappa(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(nk));
      std::vector<double> dep(values.begin() + static_cast<std::ptrdiff_t>(nk), values.end());
      return family == Family::Sine ? sine(std::move(kappa), std::move(dep))
                                    : cosine(std::move(kappa), std::move(dep));
    }
    case Family::WrappedCauchy:
      if (dim != 2 || values.size() != 3)
        throw DimensionError("wrapped Cauchy: bivariate only, parameters (kappa1, kappa2, r)");
      return wrapped_cauchy(values[0], values[1], values[2]);
  }
  throw DomainError("from_values: unknown family");
}

double FamilyParams::r() const {
  if (dim_ != 2 || dep_.size() != 1) throw DimensionError("r(): defined for bivariate families only");
  return dep_[0];
}

std::vector<double> FamilyParams::values() const {
  std::vector<double> v(kappa_);
  v.insert(v.end(), dep_.begin(), dep_.end());
  return v;
}

double WCCoefficients::denominator(double y1, double y2) const {
  const double c_1 = std::cos(y1);
  const double c_2 = std::cos(y2);
  return c0 - c1 * c_1 - c2 * c_2 - c3 * c_1 * c_2 - c4 * std::sin(y1) * std::sin(y2);
}

namespace {

WCCoefficients wc_coefficients_unchecked(double k1, double k2, double r) {
  const double ar = std::abs(r);
  const double r2 = 1.0 + r * r;
  const double a1 = 1.0 + k1 * k1;
  const double a2 = 1.0 + k2 * k2;
  WCCoefficients c;
  c.c0 = r2 * a1 * a2 - 8.0 * ar * k1 * k2;
  c.c1 = 2.0 * r2 * k1 * a2 - 4.0 * ar * a1 * k2;
  c.c2 = 2.0 * r2 * a1 * k2 - 4.0 * ar * k1 * a2;
  c.c3 = -4.0 * r2 * k1 * k2 + 2.0 * ar * a1 * a2;
  c.c4 = 2.0 * r * (1.0 - k1 * k1) * (1.0 - k2 * k2);
  return c;
}

// log of 4 pi^2 / ((1 - r^2)(1 - k1^2)(1 - k2^2)), the wrapped Cauchy "constant".
double wc_log_norm(double k1, double k2, double r) {
  return kLog4Pi2 - std::log((1.0 - r * r) * (1.0 - k1 * k1) * (1.0 - k2 * k2));
}

}  // namespace

WCCoefficients wc_coefficients(double kappa1, double kappa2, double r) {
  if (!(kappa1 >= 0.0 && kappa1 < 1.0) || !(kappa2 >= 0.0 && kappa2 < 1.0) || !(std::abs(r) < 1.0))
    throw DomainError("wc_coefficients: need kappa in [0, 1) and |r| < 1");
  return wc_coefficients_unchecked(kappa1, kappa2, r);
}

LogNormConst sine_log_norm_const_grad(double kappa1, double kappa2, double r) {
  check_exponent_args(kappa1, kappa2, r);
  if (r == 0.0) return independent_log_norm_const(kappa1, kappa2);
  const double prod = kappa1 * kappa2;
  if (prod == 0.0 || r * r / (4.0 * prod) > kSineQuadratureRatio) {
    const double theta[3] = {kappa1, kappa2, r};
    return exponent_quadrature(Family::Sine, 2, theta);
  }
  // C = 4 pi^2 sum_i binom(2i, i) (r^2 / (4 k1 k2))^i I_i(k1) I_i(k2), summed in log space.
  const double log_ratio = std::log(r * r) - std::log(4.0 * prod);
  int max_order = std::min(kMaxSeriesTerms, 40 + 2 * static_cast<int>(std::ceil(std::abs(r))));
  for (;;) {
    const auto a = numerics::bessel_i_scaled_sequence(max_order + 1, kappa1);
    const auto b = numerics::bessel_i_scaled_sequence(max_order + 1, kappa2);
    std::vector<double> log_terms;
    double log_sum = -std::numeric_limits<double>::infinity();
    double log_binom = 0.0;
    bool converged = false;
    for (int i = 0; i <= max_order; ++i) {
      if (i > 0) log_binom += std::log((2.0 * i - 1.0) * (2.0 * i) / (static_cast<double>(i) * i));
      const auto ui = static_cast<std::size_t>(i);
      const double lt = log_binom + i * log_ratio + std::log(a[ui]) + kappa1 + std::log(b[ui]) + kappa2;
      log_terms.push_back(lt);
      log_sum = numerics::log_add_exp(log_sum, lt);
      if (i > 0 && lt < log_terms[ui - 1] && lt < log_sum + std::log(kSeriesRelTol)) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      if (max_order >= kMaxSeriesTerms)
        throw ConvergenceError("sine_log_norm_const: series did not converge in 500 terms");
      max_order = kMaxSeriesTerms;
      continue;
    }
    LogNormConst out;
    out.value = kLog4Pi2 + log_sum;
    out.grad.assign(3, 0.0);
    for (std::size_t i = 0; i < log_terms.size(); ++i) {
      const double w = std::exp(log_terms[i] - log_sum);
      if (w == 0.0) continue;
      out.grad[0] += w * a[i + 1] / a[i];
      out.grad[1] += w * b[i + 1] / b[i];
      out.grad[2] += w * 2.0 * static_cast<double>(i) / r;
    }
    return out;
  }
}

LogNormConst cosine_log_norm_const_grad(double kappa1, double kappa2, double r) {
  check_exponent_args(kappa1, kappa2, r);
  // C = 4 pi^2 (I0(k1) I0(k2) I0(r) + 2 sum_{i>=1} I_i(k1) I_i(k2) I_i(r)), with
  // I_i(-x) = (-1)^i I_i(x); accumulated on the exp(-(k1 + k2 + |r|)) scale.
  const double ar = std::abs(r);
  const double sign = r < 0.0 ? -1.0 : 1.0;
  int max_order = std::min(kMaxSeriesTerms,
                           60 + static_cast<int>(std::ceil(8.0 * std::sqrt(std::max({kappa1, kappa2, ar})))));
  for (;;) {
    const auto a = numerics::bessel_i_scaled_sequence(max_order + 1, kappa1);
    const auto b = numerics::bessel_i_scaled_sequence(max_order + 1, kappa2);
    const auto c = numerics::bessel_i_scaled_sequence(max_order + 1, ar);
    double s = 0, s_abs = 0, ds1 = 0, ds2 = 0, dsr = 0;
    bool converged = false;
    for (int i = 0; i <= max_order; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const auto um = static_cast<std::size_t>(i == 0 ? 1 : i - 1);
      const double w = i == 0 ? 1.0 : 2.0;
      const double sgn_i = (i % 2 == 1) ? sign : 1.0;
      const double sgn_prev = (i % 2 == 0) ? sign : 1.0;  // sign^(i-1)
      const double mag = a[ui] * b[ui] * c[ui];
      s += w * sgn_i * mag;
      s_abs += w * mag;
      ds1 += w * 0.5 * (a[um] + a[ui + 1]) * b[ui] * c[ui] * sgn_i;
      ds2 += w * a[ui] * 0.5 * (b[um] + b[ui + 1]) * c[ui] * sgn_i;
      dsr += w * a[ui] * b[ui] * 0.5 * (c[um] + c[ui + 1]) * sgn_prev;
      const double next_mag = a[ui + 1] * b[ui + 1] * c[ui + 1];
      if (i > 0 && mag < kSeriesRelTol * s_abs && next_mag <= mag) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      if (max_order >= kMaxSeriesTerms)
        throw ConvergenceError("cosine_log_norm_const: series did not converge in 500 terms");
      max_order = kMaxSeriesTerms;
      continue;
    }
    if (!(s > 1e-6 * s_abs)) {
      // heavy cancellation for strongly negative r
      const double theta[3] = {kappa1, kappa2, r};
      return exponent_quadrature(Family::Cosine, 2, theta);
    }
    LogNormConst out;
    out.value = kLog4Pi2 + kappa1 + kappa2 + ar + std::log(s);
    out.grad = {ds1 / s, ds2 / s, dsr / s};
    return out;
  }
}

double sine_log_norm_const(double kappa1, double kappa2, double r) {
  return sine_log_norm_const_grad(kappa1, kappa2, r).value;
}

double cosine_log_norm_const(double kappa1, double kappa2, double r) {
  return cosine_log_norm_const_grad(kappa1, kappa2, r).value;
}

namespace {

class LogNormCache {
 public:
  LogNormConst get(Family family, int dim, std::vector<double> theta) {
    Key key{static_cast<int>(family), dim, std::move(theta)};
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    LogNormConst value = exponent_quadrature(family, dim, std::get<2>(key));
    std::lock_guard lock(mutex_);
    if (cache_.size() > 4096) cache_.clear();
    cache_.emplace(std::move(key), value);
    return value;
  }

 private:
  using Key = std::tuple<int, int, std::vector<double>>;
  std::mutex mutex_;
  std::map<Key, LogNormConst> cache_;
};

LogNormCache& log_norm_cache() {
  static LogNormCache cache;
  return cache;
}

}  // namespace

LogNormConst exponent_log_norm_const(const FamilyParams& params) {
  const Family family = params.family();
  if (family != Family::Sine && family != Family::Cosine)
    throw DomainError("exponent_log_norm_const: Sine or Cosine family required");
  const int dim = params.dim();
  if (dim == 1) {
    const double kappa = params.kappa()[0];
    const auto a = numerics::bessel_i_scaled_sequence(1, kappa);
    return LogNormConst{kLog2Pi + kappa + std::log(a[0]), {a[1] / a[0]}};
  }
  if (dim == 2) {
    const double k1 = params.kappa()[0], k2 = params.kappa()[1], r = params.r();
    try {
      return family == Family::Sine ? sine_log_norm_const_grad(k1, k2, r)
                                    : cosine_log_norm_const_grad(k1, k2, r);
    } catch (const ConvergenceError&) {
      // very large |r|: fall back to quadrature so fits can move through this region
      const double theta[3] = {k1, k2, r};
      return exponent_quadrature(family, 2, theta);
    }
  }
  return log_norm_cache().get(family, dim, params.values());
}

BaseDensity::BaseDensity(FamilyParams params) : params_(std::move(params)) {
  switch (params_.family()) {
    case Family::Uniform:
      log_norm_.value = params_.dim() * kLog2Pi;
      break;
    case Family::Sine:
    case Family::Cosine:
      log_norm_ = exponent_log_norm_const(params_);
      break;
    case Family::WrappedCauchy: {
      const double k1 = params_.kappa()[0], k2 = params_.kappa()[1], r = params_.r();
      wc_ = wc_coefficients(k1, k2, r);
      log_norm_.value = wc_log_norm(k1, k2, r);
      const double t0[3] = {k1, k2, r};
      for (int k = 0; k < 3; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        wc_step_[uk] = std::min(kWcStep, 0.5 * (1.0 - std::abs(t0[k])));
        for (int side = 0; side < 2; ++side) {
          double t[3] = {k1, k2, r};
          t[k] += side == 0 ? wc_step_[uk] : -wc_step_[uk];
          const auto idx = static_cast<std::size_t>(2 * k + side);
          wc_perturbed_[idx] = wc_coefficients_unchecked(t[0], t[1], t[2]);
          wc_perturbed_log_prefactor_[idx] = -wc_log_norm(t[0], t[1], t[2]);
        }
      }
      break;
    }
  }
}

double BaseDensity::exponent(std::span<const double> y) const {
  const int dim = params_.dim();
  const auto kappa = params_.kappa();
  double e = 0;
  for (int s = 0; s < dim; ++s) e += kappa[static_cast<std::size_t>(s)] * std::cos(y[static_cast<std::size_t>(s)]);
  if (dim < 2) return e;
  const auto dep = params_.dep();
  const bool sine = params_.family() == Family::Sine;
  if (dim == 2) return e + dep[0] * (sine ? std::sin(y[0]) * std::sin(y[1]) : std::cos(y[0] - y[1]));
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      const double yi = y[static_cast<std::size_t>(i)], yj = y[static_cast<std::size_t>(j)];
      e += 2.0 * dep[pair_index(i, j, dim)] * (sine ? std::sin(yi) * std::sin(yj) : std::cos(yi - yj));
    }
  return e;
}

double BaseDensity::wc_log_density(const WCCoefficients& c, double log_prefactor,
                                   std::span<const double> y) const {
  return log_prefactor - std::log(c.denominator(y[0], y[1]));
}

double BaseDensity::log_density(std::span<const double> y) const {
  if (y.size() != static_cast<std::size_t>(params_.dim()))
    throw DimensionError("base density: point dimension does not match parameters");
  switch (params_.family()) {
    case Family::Uniform: return -log_norm_.value;
    case Family::WrappedCauchy: return wc_log_density(wc_, -log_norm_.value, y);
    default: return exponent(y) - log_norm_.value;
  }
}

double BaseDensity::log_density_grad_y(std::span<const double> y, std::span<double> grad_y) const {
  const int dim = params_.dim();
  if (y.size() != static_cast<std::size_t>(dim) || grad_y.size() != y.size())
    throw DimensionError("base density: point dimension does not match parameters");
  switch (params_.family()) {
    case Family::Uniform:
      std::fill(grad_y.begin(), grad_y.end(), 0.0);
      return -log_norm_.value;
    case Family::WrappedCauchy: {
      const double s1 = std::sin(y[0]), c1 = std::cos(y[0]);
      const double s2 = std::sin(y[1]), c2 = std::cos(y[1]);
      const double den = wc_.c0 - wc_.c1 * c1 - wc_.c2 * c2 - wc_.c3 * c1 * c2 - wc_.c4 * s1 * s2;
      grad_y[0] = -(wc_.c1 * s1 + wc_.c3 * s1 * c2 - wc_.c4 * c1 * s2) / den;
      grad_y[1] = -(wc_.c2 * s2 + wc_.c3 * c1 * s2 - wc_.c4 * s1 * c2) / den;
      return -log_norm_.value - std::log(den);
    }
    default: break;
  }
  const auto kappa = params_.kappa();
  const auto dep = params_.dep();
  const bool sine = params_.family() == Family::Sine;
  for (int s = 0; s < dim; ++s)
    grad_y[static_cast<std::size_t>(s)] = -kappa[static_cast<std::size_t>(s)] * std::sin(y[static_cast<std::size_t>(s)]);
  if (dim == 2) {
    const double r = dep[0];
    if (sine) {
      grad_y[0] += r * std::cos(y[0]) * std::sin(y[1]);
      grad_y[1] += r * std::sin(y[0]) * std::cos(y[1]);
    } else {
      const double sd = std::sin(y[0] - y[1]);
      grad_y[0] -= r * sd;
      grad_y[1] += r * sd;
    }
  } else if (dim > 2) {
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) {
        const double rr = 2.0 * dep[pair_index(i, j, dim)];
        const double yi = y[static_cast<std::size_t>(i)], yj = y[static_cast<std::size_t>(j)];
        if (sine) {
          grad_y[static_cast<std::size_t>(i)] += rr * std::cos(yi) * std::sin(yj);
          grad_y[static_cast<std::size_t>(j)] += rr * std::sin(yi) * std::cos(yj);
        } else {
          const double sd = std::sin(yi - yj);
          grad_y[static_cast<std::size_t>(i)] -= rr * sd;
          grad_y[static_cast<std::size_t>(j)] += rr * sd;
        }
      }
  }
  return exponent(y) - log_norm_.value;
}

void BaseDensity::sufficient_stats(std::span<const double> y, std::span<double> out) const {
  const Family family = params_.family();
  if (family != Family::Sine && family != Family::Cosine)
    throw DomainError("sufficient_stats: Sine or Cosine family required");
  exponent_stats(family, params_.dim(), y, out);
}

void BaseDensity::grad_theta(std::span<const double> y, std::span<double> out) const {
  if (out.size() != params_.num_values()) throw DimensionError("grad_theta: wrong output size");
  switch (params_.family()) {
    case Family::Uniform: return;
    case Family::WrappedCauchy:
      for (std::size_t k = 0; k < 3; ++k) {
        const double up = wc_log_density(wc_perturbed_[2 * k], wc_perturbed_log_prefactor_[2 * k], y);
        const double down =
            wc_log_density(wc_perturbed_[2 * k + 1], wc_perturbed_log_prefactor_[2 * k + 1], y);
        out[k] = (up - down) / (2.0 * wc_step_[k]);
      }
      return;
    default:
      exponent_stats(params_.family(), params_.dim(), y, out);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] -= log_norm_.grad[k];
  }
}

double base_log_density(const FamilyParams& params, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(params.dim()))
    throw DimensionError("base_log_density: dimension mismatch");
  std::vector<double> y(x.begin(), x.end());
  for (double& v : y) v = wrap_angle(v);
  return BaseDensity(params).log_density(y);
}

std::string_view modality_name(Modality m) {
  switch (m) {
    case Modality::Unimodal: return "unimodal";
    case Modality::Multimodal: return "multimodal";
    case Modality::Unknown: return "unknown";
  }
  return "unknown";
}

Modality base_is_unimodal(const FamilyParams& params) {
  if (params.dim() != 2) throw DimensionError("base_is_unimodal: bivariate families only");
  switch (params.family()) {
    case Family::Uniform: return Modality::Unknown;
    case Family::Sine: {
      const double prod = params.kappa()[0] * params.kappa()[1];
      const double r2 = params.r() * params.r();
      if (prod == 0.0 || prod == r2) return Modality::Unknown;
      return prod > r2 ? Modality::Unimodal : Modality::Multimodal;
    }
    case Family::Cosine: {
      const double k1 = params.kappa()[0], k2 = params.kappa()[1];
      if (k1 + k2 == 0.0) return Modality::Unknown;
      // two modes only between the bounds; past the upper one the single mode
      // sits at (0, pi) or (pi, 0)
      const double lower = k1 * k2 / (k1 + k2);
      const double upper = k1 == k2 ? std::numeric_limits<double>::infinity() : k1 * k2 / std::abs(k1 - k2);
      const double lhs = -params.r();
      if (lhs == lower || lhs == upper) return Modality::Unknown;
      return lhs > lower && lhs < upper ? Modality::Multimodal : Modality::Unimodal;
    }
    case Family::WrappedCauchy:
      return params.kappa()[0] > 0.0 && params.kappa()[1] > 0.0 ? Modality::Unimodal : Modality::Unknown;
  }
  return Modality::Unknown;
}

double von_mises_log_density(double kappa, double y) {
  return kappa * std::cos(y) - kLog2Pi - numerics::log_bessel_i(0, kappa);
}

double wrapped_cauchy_log_density(double rho, double y) {
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("wrapped Cauchy: rho must lie in [0, 1)");
  return std::log1p(-rho * rho) - kLog2Pi - std::log(1.0 + rho * rho - 2.0 * rho * std::cos(y));
}

}  // namespace skewtorus
