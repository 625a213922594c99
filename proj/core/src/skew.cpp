#include "skewtorus/skew.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>

#include "skewtorus/errors.hpp"
#include "skewtorus/numerics.hpp"

namespace skewtorus {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxProposals = 1000000;
constexpr int kGibbsBurnIn = 1000;
constexpr int kGibbsThin = 5;
constexpr int kMarginalNodes = 512;
constexpr int kGateGrid = 64;

std::size_t pair_index(int i, int j, int dim) {
  return static_cast<std::size_t>(i * dim - i * (i + 1) / 2 + (j - i - 1));
}

double skew_sum(std::span<const double> lambda, std::span<const double> y) {
  double s = 0;
  for (std::size_t k = 0; k < lambda.size(); ++k) s += lambda[k] * std::sin(y[k]);
  return s;
}

}  // namespace

SkewModel::SkewModel(TorusPoint mu, FamilyParams theta, std::vector<double> lambda)
    : mu_(std::move(mu)), lambda_(std::move(lambda)) {
  if (mu_.dim() != static_cast<std::size_t>(theta.dim()) || lambda_.size() != mu_.dim())
    throw DimensionError("SkewModel: dimensions of mu, theta and lambda disagree");
  double total = 0;
  for (double l : lambda_) {
    if (!std::isfinite(l) || std::abs(l) > 1.0 + kLambdaSlack)
      throw DomainError("SkewModel: each lambda must lie in [-1, 1]");
    total += std::abs(l);
  }
  if (total > 1.0 + kLambdaSlack) throw DomainError("SkewModel: sum of |lambda| exceeds 1");
  base_ = std::make_shared<const BaseDensity>(std::move(theta));
}

SkewModel SkewModel::symmetric(TorusPoint mu, FamilyParams theta) {
  std::vector<double> lambda(mu.dim(), 0.0);
  return SkewModel(std::move(mu), std::move(theta), std::move(lambda));
}

bool SkewModel::is_symmetric() const {
  return std::all_of(lambda_.begin(), lambda_.end(), [](double l) { return l == 0.0; });
}

double SkewModel::skew_factor(std::span<const double> y) const { return 1.0 + skew_sum(lambda_, y); }

double SkewModel::log_density(std::span<const double> x) const {
  const std::size_t d = mu_.dim();
  if (x.size() != d) throw DimensionError("log_density: point dimension does not match model");
  double yb[8];
  std::vector<double> heap;
  std::span<double> y;
  if (d <= 8) {
    y = std::span<double>(yb, d);
  } else {
    heap.resize(d);
    y = heap;
  }
  for (std::size_t s = 0; s < d; ++s) y[s] = angle_diff(x[s], mu_[s]);
  const double factor = skew_factor(y);
  if (factor <= 0.0) return kNegInf;
  return base_->log_density(y) + std::log(factor);
}

double skew_log_density(const SkewModel& model, const TorusPoint& x) { return model.log_density(x); }

double skew_cdf(const SkewModel& model, std::span<const double> upper) {
  const int d = model.dim();
  if (upper.size() != static_cast<std::size_t>(d)) throw DimensionError("skew_cdf: dimension mismatch");
  const int panels = d <= 2 ? 32 : (d == 3 ? 16 : 4);
  const int order = d <= 3 ? 8 : 6;
  std::vector<numerics::GaussRule> rules;
  for (int s = 0; s < d; ++s) {
    const double hi = upper[static_cast<std::size_t>(s)];
    if (!std::isfinite(hi)) throw DomainError("skew_cdf: upper corner must be finite");
    const double b = std::clamp(hi, -kPi, kPi);
    if (b <= -kPi) return 0.0;
    rules.push_back(numerics::composite_gauss_legendre(-kPi, b, panels, order));
  }
  const std::size_t m = rules[0].nodes.size();
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> x(static_cast<std::size_t>(d));
  double total = 0;
  for (;;) {
    double w = 1;
    for (std::size_t s = 0; s < idx.size(); ++s) {
      x[s] = rules[s].nodes[idx[s]];
      w *= rules[s].weights[idx[s]];
    }
    const double ld = model.log_density(x);
    if (ld > kNegInf) total += w * std::exp(ld);
    std::size_t s = 0;
    while (s < idx.size() && ++idx[s] == m) idx[s++] = 0;
    if (s == idx.size()) break;
  }
  return std::clamp(total, 0.0, 1.0);
}

double sample_von_mises(double kappa, Rng& rng) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw DomainError("von Mises sampler: kappa must be >= 0");
  if (kappa < 1e-8) return wrap_angle(rng.uniform(-kPi, kPi));
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  const double s = (1.0 + rho * rho) / (2.0 * rho);
  for (;;) {
    const double z = std::cos(kPi * rng.uniform());
    const double f = (1.0 + s * z) / (s + z);
    const double c = kappa * (s - f);
    const double u2 = rng.uniform_open();
    if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
      const double theta = std::acos(std::clamp(f, -1.0, 1.0));
      return wrap_angle(rng.uniform() < 0.5 ? -theta : theta);
    }
  }
}

double sample_wrapped_cauchy(double rho, Rng& rng) {
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("wrapped Cauchy sampler: rho must lie in [0, 1)");
  const double u = rng.uniform_open();
  return wrap_angle(2.0 * std::atan((1.0 - rho) / (1.0 + rho) * std::tan(kPi * (u - 0.5))));
}

namespace {

double conditional_wc(const WCCoefficients& c, double x1, Rng& rng) {
  const double a = c.c0 - c.c1 * std::cos(x1);
  const double b = c.c2 + c.c3 * std::cos(x1);
  const double cc = c.c4 * std::sin(x1);
  const double r = std::hypot(b, cc);
  if (r == 0.0) return wrap_angle(rng.uniform(-kPi, kPi));
  const double phi = std::atan2(cc, b);
  const double rho = std::clamp((a - std::sqrt(std::max(0.0, a * a - r * r))) / r, 0.0, 1.0 - 1e-15);
  return wrap_angle(phi + sample_wrapped_cauchy(rho, rng));
}

void gibbs_sweep(const FamilyParams& theta, std::vector<double>& y, Rng& rng) {
  const int d = theta.dim();
  const auto kappa = theta.kappa();
  const auto dep = theta.dep();
  const bool sine = theta.family() == Family::Sine;
  for (int i = 0; i < d; ++i) {
    double a = kappa[static_cast<std::size_t>(i)];
    double b = 0;
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      const double rr = 2.0 * dep[pair_index(std::min(i, j), std::max(i, j), d)];
      const double yj = y[static_cast<std::size_t>(j)];
      if (sine) {
        b += rr * std::sin(yj);
      } else {
        a += rr * std::cos(yj);
        b += rr * std::sin(yj);
      }
    }
    const double k = std::hypot(a, b);
    y[static_cast<std::size_t>(i)] = wrap_angle(std::atan2(b, a) + sample_von_mises(k, rng));
  }
}

}  // namespace

std::vector<TorusPoint> sample_base(const FamilyParams& theta, std::size_t n, Rng& rng) {
  const int d = theta.dim();
  std::vector<TorusPoint> out;
  out.reserve(n);
  switch (theta.family()) {
    case Family::Uniform:
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> y(static_cast<std::size_t>(d));
        for (double& v : y) v = rng.uniform(-kPi, kPi);
        out.emplace_back(std::move(y));
      }
      return out;
    case Family::WrappedCauchy: {
      const auto c = wc_coefficients(theta.kappa()[0], theta.kappa()[1], theta.r());
      for (std::size_t i = 0; i < n; ++i) {
        const double x1 = sample_wrapped_cauchy(theta.kappa()[0], rng);
        out.push_back(TorusPoint{x1, conditional_wc(c, x1, rng)});
      }
      return out;
    }
    default: break;
  }
  const auto kappa = theta.kappa();
  if (d == 1) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(TorusPoint{sample_von_mises(kappa[0], rng)});
    return out;
  }
  if (d == 2) {
    const double r = theta.r();
    const bool sine = theta.family() == Family::Sine;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t tries = 0;
      for (;;) {
        if (++tries > kMaxProposals) throw SamplingError("rejection sampler: proposal cap exceeded");
        const double y1 = sample_von_mises(kappa[0], rng);
        const double y2 = sample_von_mises(kappa[1], rng);
        const double t = sine ? std::sin(y1) * std::sin(y2) : std::cos(y1 - y2);
        if (std::log(rng.uniform_open()) <= r * t - std::abs(r)) {
          out.push_back(TorusPoint{y1, y2});
          break;
        }
      }
    }
    return out;
  }
  std::vector<double> y(static_cast<std::size_t>(d), 0.0);
  for (int k = 0; k < kGibbsBurnIn; ++k) gibbs_sweep(theta, y, rng);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < kGibbsThin; ++k) gibbs_sweep(theta, y, rng);
    out.emplace_back(y);
  }
  return out;
}

TorusPoint skew_reflect(const SkewModel& model, const TorusPoint& base_draw, double u) {
  const std::size_t d = static_cast<std::size_t>(model.dim());
  if (base_draw.dim() != d) throw DimensionError("skew_reflect: dimension mismatch");
  const bool keep = u <= 0.5 * model.skew_factor(base_draw.angles());
  std::vector<double> x(d);
  for (std::size_t s = 0; s < d; ++s) x[s] = model.mu()[s] + (keep ? base_draw[s] : -base_draw[s]);
  return TorusPoint(std::move(x));
}

std::vector<TorusPoint> sample(const SkewModel& model, std::size_t n, Rng& rng) {
  if (n == 0) throw DomainError("sample: n must be positive");
  auto draws = sample_base(model.theta(), n, rng);
  for (auto& y : draws) y = skew_reflect(model, y, rng.uniform());
  return draws;
}

namespace {

// Base cosine moments by quadrature, memoised per order.
class QuadratureMoments {
 public:
  explicit QuadratureMoments(const FamilyParams& theta)
      : grid_(numerics::QuadratureGrid::standard(theta.dim())) {
    const BaseDensity base(theta);
    density_.resize(grid_.size());
    points_.resize(grid_.size() * static_cast<std::size_t>(grid_.dim()));
    double total = 0;
    const auto d = static_cast<std::size_t>(grid_.dim());
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      std::span<double> x(points_.data() + i * d, d);
      grid_.node(i, x);
      density_[i] = std::exp(base.log_density(x));
      total += density_[i];
    }
    for (double& v : density_) v /= total;
  }

  double operator()(std::span<const int> p) {
    const std::vector<int> key(p.begin(), p.end());
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const auto d = static_cast<std::size_t>(grid_.dim());
    double sum = 0;
    for (std::size_t i = 0; i < density_.size(); ++i) {
      double arg = 0;
      for (std::size_t s = 0; s < d; ++s) arg += p[s] * points_[i * d + s];
      sum += density_[i] * std::cos(arg);
    }
    cache_.emplace(key, sum);
    return sum;
  }

 private:
  numerics::QuadratureGrid grid_;
  std::vector<double> density_;
  std::vector<double> points_;
  std::mutex mutex_;
  std::map<std::vector<int>, double> cache_;
};

// E[cos(p y)] for a von Mises(kappa) variable.
double von_mises_moment(double kappa, int p) {
  p = std::abs(p);
  if (p == 0) return 1.0;
  const auto seq = numerics::bessel_i_scaled_sequence(p, kappa);
  return seq[static_cast<std::size_t>(p)] / seq[0];
}

}  // namespace

CosineMomentFn base_cosine_moments(const FamilyParams& theta) {
  const int d = theta.dim();
  auto check = [d](std::span<const int> p) {
    if (p.size() != static_cast<std::size_t>(d)) throw DimensionError("cosine moment: order has wrong dimension");
  };
  const Family family = theta.family();
  if (family == Family::Uniform) {
    return [check](std::span<const int> p) {
      check(p);
      return std::all_of(p.begin(), p.end(), [](int v) { return v == 0; }) ? 1.0 : 0.0;
    };
  }
  const bool independent = d == 1 || (d == 2 && theta.r() == 0.0);
  if (independent && family != Family::WrappedCauchy) {
    std::vector<double> kappa(theta.kappa().begin(), theta.kappa().end());
    return [check, kappa](std::span<const int> p) {
      check(p);
      double m = 1;
      for (std::size_t s = 0; s < kappa.size(); ++s) m *= von_mises_moment(kappa[s], p[s]);
      return m;
    };
  }
  if (independent) {
    const double k1 = theta.kappa()[0], k2 = theta.kappa()[1];
    return [check, k1, k2](std::span<const int> p) {
      check(p);
      return std::pow(k1, std::abs(p[0])) * std::pow(k2, std::abs(p[1]));
    };
  }
  auto state = std::make_shared<QuadratureMoments>(theta);
  return [check, state](std::span<const int> p) {
    check(p);
    return (*state)(p);
  };
}

TrigMoment trig_moments(const SkewModel& model, std::span<const int> p, const CosineMomentFn& base_moment) {
  const std::size_t d = static_cast<std::size_t>(model.dim());
  if (p.size() != d) throw DimensionError("trig_moments: order has wrong dimension");
  TrigMoment out;
  out.alpha = base_moment(p);
  std::vector<int> q(p.begin(), p.end());
  const auto lambda = model.lambda();
  for (std::size_t s = 0; s < d; ++s) {
    if (lambda[s] == 0.0) continue;
    q[s] = p[s] - 1;
    const double lo = base_moment(q);
    q[s] = p[s] + 1;
    const double hi = base_moment(q);
    q[s] = p[s];
    out.beta += 0.5 * lambda[s] * (lo - hi);
  }
  return out;
}

TrigMoment trig_moments(const SkewModel& model, std::span<const int> p) {
  return trig_moments(model, p, base_cosine_moments(model.theta()));
}

ShapeSummary shape_summary(const SkewModel& model, const CosineMomentFn& base_moment) {
  const std::size_t d = static_cast<std::size_t>(model.dim());
  ShapeSummary out;
  std::vector<double> mean(d);
  std::vector<int> p(d, 0);
  for (std::size_t s = 0; s < d; ++s) {
    std::fill(p.begin(), p.end(), 0);
    p[s] = 1;
    const TrigMoment m1 = trig_moments(model, p, base_moment);
    p[s] = 2;
    const TrigMoment m2 = trig_moments(model, p, base_moment);
    const double a1 = m1.alpha, b1 = m1.beta;
    const double rho2 = a1 * a1 + b1 * b1;
    const double rho = std::sqrt(rho2);
    const double var = 1.0 - rho;
    if (var < 1e-12) throw DomainError("shape_summary: circular variance vanishes");
    double abar2 = m2.alpha, bbar2 = m2.beta;
    if (rho2 > 0.0) {
      const double c2 = (a1 * a1 - b1 * b1) / rho2;
      const double s2 = 2.0 * a1 * b1 / rho2;
      abar2 = m2.alpha * c2 + m2.beta * s2;
      bbar2 = m2.beta * c2 - m2.alpha * s2;
      mean[s] = model.mu()[s] + std::atan2(b1, a1);
    } else {
      mean[s] = model.mu()[s];
    }
    out.concentration.push_back(rho);
    out.variance.push_back(var);
    out.skewness.push_back(bbar2 / std::pow(var, 1.5));
    out.kurtosis.push_back((abar2 - rho2) / (var * var));
  }
  out.mean_direction = TorusPoint(std::move(mean));
  return out;
}

ShapeSummary shape_summary(const SkewModel& model) {
  return shape_summary(model, base_cosine_moments(model.theta()));
}

MarginalDensity::MarginalDensity(SkewModel model, int coordinate, MarginalMethod requested)
    : model_(std::move(model)), coord_(coordinate) {
  if (model_.dim() != 2) throw DimensionError("marginal: bivariate model required");
  if (coord_ != 1 && coord_ != 2) throw DomainError("marginal: coordinate must be 1 or 2");
  if (requested != MarginalMethod::PrintedClosedForm) return;
  for (int i = 0; i < kGateGrid; ++i) {
    const double x = -kPi + kTwoPi * i / kGateGrid;
    const double diff = std::abs(printed_density(x) - std::exp(quadrature_log_density(x)));
    discrepancy_ = std::max(discrepancy_, diff);
  }
  closed_form_enabled_ = discrepancy_ <= kGateTolerance;
}

double MarginalDensity::quadrature_log_density(double x) const {
  const std::size_t k = static_cast<std::size_t>(coord_ - 1);
  double pt[2];
  double sum = 0;
  for (int j = 0; j < kMarginalNodes; ++j) {
    pt[k] = x;
    pt[1 - k] = -kPi + kTwoPi * j / kMarginalNodes;
    const double ld = model_.log_density(std::span<const double>(pt, 2));
    if (ld > kNegInf) sum += std::exp(ld);
  }
  return std::log(sum * kTwoPi / kMarginalNodes);
}

double MarginalDensity::printed_density(double x) const {
  const Family family = model_.family();
  if (family != Family::Sine && family != Family::Cosine)
    throw DomainError("marginal closed form: Sine or Cosine base required");
  const std::size_t k = static_cast<std::size_t>(coord_ - 1);
  const std::size_t o = 1 - k;
  const double k_own = model_.theta().kappa()[k];
  const double k_other = model_.theta().kappa()[o];
  const double r = model_.theta().r();
  const double t = angle_diff(x, model_.mu()[k]);
  double a, b;
  if (family == Family::Sine) {
    a = std::sqrt(k_other * k_other + r * r * std::sin(t) * std::sin(t));
    b = std::atan2(r * std::sin(t), k_other);
  } else {
    a = std::hypot(k_other + r * std::cos(t), r * std::sin(t));
    b = std::atan2(r * std::sin(t), k_other + r * std::cos(t));
  }
  const double i0 = numerics::bessel_i(0, a);
  const double i1 = numerics::bessel_i(1, a);
  const auto lambda = model_.lambda();
  const double bracket = kTwoPi * i0 * (1.0 + lambda[k] * std::sin(t)) +
                         lambda[o] * (i1 / i0) * std::cos(model_.mu()[o] + b);
  return std::exp(k_own * std::cos(t) - model_.base().log_norm_const()) * bracket;
}

double MarginalDensity::log_density(double x) const {
  if (closed_form_enabled_) return std::log(printed_density(x));
  return quadrature_log_density(x);
}

double sine_marginal_log_density(const SkewModel& model, int coordinate, double x, MarginalMethod method) {
  if (model.family() != Family::Sine && model.family() != Family::Cosine)
    throw DomainError("marginal: Sine or Cosine base required");
  return MarginalDensity(model, coordinate, method).log_density(x);
}

}  // namespace skewtorus
