#include "skewtorus/inference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "parameter_map.hpp"
#include "skewtorus/errors.hpp"
#include "skewtorus/optimizer.hpp"
#include "skewtorus/random.hpp"

namespace skewtorus {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kBoundaryTol = 1e-6;
constexpr double kLrtSlack = 1e-6;

void check_data(std::span<const TorusPoint> data, int dim) {
  if (data.empty()) throw DimensionError("empty sample");
  for (const auto& x : data)
    if (x.dim() != static_cast<std::size_t>(dim)) throw DimensionError("sample point has the wrong dimension");
}

// Inverse of the von Mises mean resultant length A(kappa) = I1/I0.
double inverse_a1(double r) {
  if (r < 0.53) return 2.0 * r + r * r * r + 5.0 * std::pow(r, 5) / 6.0;
  if (r < 0.85) return -0.4 + 1.39 * r + 0.43 / (1.0 - r);
  return 1.0 / (r * r * r - 4.0 * r * r + 3.0 * r);
}

std::vector<double> moment_start(const detail::ParameterMap& map, std::span<const TorusPoint> data,
                                 std::span<const double> weights) {
  const auto d = static_cast<std::size_t>(map.dim());
  std::vector<double> v(map.var_count(), 0.0);
  double total = 0;
  std::vector<double> c(d, 0.0), s(d, 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    total += w;
    for (std::size_t k = 0; k < d; ++k) {
      c[k] += w * std::cos(data[i][k]);
      s[k] += w * std::sin(data[i][k]);
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    v[k] = std::atan2(s[k], c[k]);
    const double rbar = std::min(std::hypot(c[k], s[k]) / total, 0.999);
    if (map.family() == Family::WrappedCauchy) {
      v[d + k] = rbar;
    } else if (map.family() != Family::Uniform) {
      v[d + k] = inverse_a1(rbar);
    }
  }
  map.clamp(v);
  return v;
}

std::vector<double> jitter_start(const detail::ParameterMap& map, const std::vector<double>& base, Rng& rng) {
  const auto d = static_cast<std::size_t>(map.dim());
  std::vector<double> v = base;
  for (std::size_t k = 0; k < d; ++k) v[k] = rng.uniform(-kPi, kPi);
  const std::size_t nt = map.theta_count();
  for (std::size_t k = 0; k < nt; ++k) {
    const std::size_t i = d + k;
    if (map.family() == Family::WrappedCauchy) {
      v[i] = k < 2 ? std::clamp(base[i] + 0.2 * rng.normal(), 0.0, 0.95) : rng.uniform(-0.5, 0.5);
    } else if (k < d) {
      v[i] = std::max(base[i], 0.05) * std::exp(0.5 * rng.normal());
    } else {
      v[i] = 0.5 * rng.normal();
    }
  }
  if (map.skewed()) {
    std::vector<double> lambda(d);
    double total = 0;
    for (double& l : lambda) {
      l = rng.uniform(-1.0, 1.0);
      total += std::abs(l);
    }
    if (total > 0.9)
      for (double& l : lambda) l *= 0.9 / total;
    const std::size_t head = d + nt;
    if (d == 1) {
      v[head] = lambda[0];
    } else if (d == 2) {
      v[head] = lambda[0] + lambda[1];
      v[head + 1] = lambda[0] - lambda[1];
    } else {
      for (std::size_t s = 0; s < d; ++s) {
        v[head + s] = std::max(lambda[s], 0.0);
        v[head + d + s] = std::max(-lambda[s], 0.0);
      }
    }
  }
  map.clamp(v);
  return v;
}

// -(1/W) sum w_i log g(x_i) and its gradient in optimiser variables.
class NegLogLik {
 public:
  NegLogLik(const detail::ParameterMap& map, std::span<const TorusPoint> data, std::span<const double> weights)
      : map_(map), data_(data), weights_(weights) {
    total_ = 0;
    for (std::size_t i = 0; i < data.size(); ++i) total_ += weights.empty() ? 1.0 : weights[i];
  }

  double operator()(std::span<const double> v, std::span<double> grad) const {
    std::optional<SkewModel> model;
    try {
      model.emplace(map_.to_model(v));
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    } catch (const ConvergenceError&) {
      return std::numeric_limits<double>::infinity();
    }
    const bool include_lambda = map_.skewed();
    std::vector<double> nat(map_.natural_count(), 0.0), score(map_.natural_count());
    double sum = 0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const double w = weights_.empty() ? 1.0 : weights_[i];
      if (w == 0.0) continue;
      const double ld = model->log_density(data_[i].angles());
      if (!std::isfinite(ld)) return std::numeric_limits<double>::infinity();
      sum += w * ld;
      observation_score(*model, data_[i].angles(), include_lambda, score);
      for (std::size_t k = 0; k < nat.size(); ++k) nat[k] += w * score[k];
    }
    for (double& g : nat) g = -g / total_;
    map_.chain(nat, grad);
    return -sum / total_;
  }

  double total_weight() const { return total_; }

 private:
  const detail::ParameterMap& map_;
  std::span<const TorusPoint> data_;
  std::span<const double> weights_;
  double total_ = 0;
};

FitResult fit_impl(Family family, bool skewed, std::span<const TorusPoint> data, std::span<const double> weights,
                   const FitOptions& options) {
  if (data.empty()) throw DimensionError("fit: empty sample");
  const int dim = static_cast<int>(data.front().dim());
  check_data(data, dim);
  if (!weights.empty()) {
    if (weights.size() != data.size()) throw DimensionError("fit: one weight per observation required");
    double total = 0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("fit: weights must be finite and non-negative");
      total += w;
    }
    if (!(total > 0.0)) throw DomainError("fit: weights sum to zero");
  }
  const bool include_lambda = skewed && !options.fix_lambda_zero;
  const detail::ParameterMap map(family, dim, include_lambda);
  if (weights.empty() && data.size() < free_parameter_count(family, dim, include_lambda) + 5)
    throw DomainError("fit: sample too small for the number of free parameters");

  FitResult result{SkewModel::symmetric(TorusPoint::zeros(static_cast<std::size_t>(dim)), FamilyParams::uniform(dim)),
                   0.0, std::nullopt, false, false, false, 0, 0, 0,
                   parameter_names(family, dim, include_lambda)};

  const NegLogLik objective(map, data, weights);
  if (map.var_count() == 0 || (family == Family::Uniform && !include_lambda)) {
    // nothing to estimate: the symmetric uniform density is constant
    result.log_lik = -objective.total_weight() * dim * std::log(kTwoPi);
    result.converged = true;
    return result;
  }

  std::vector<std::vector<double>> starts;
  for (const auto& m : options.extra_starts) {
    if (include_lambda) {
      starts.push_back(map.from_model(m));
    } else {
      starts.push_back(map.from_model(SkewModel::symmetric(m.mu(), m.theta())));
    }
  }
  const auto moments = moment_start(map, data, weights);
  const int generated = options.n_starts;
  if (generated < 0 || (generated == 0 && starts.empty())) throw DomainError("fit: at least one start required");
  for (int k = 0; k < generated; ++k) {
    if (k == 0 && options.moment_start) {
      starts.push_back(moments);
      continue;
    }
    Rng rng = Rng::substream(options.seed, static_cast<std::uint64_t>(k));
    starts.push_back(jitter_start(map, moments, rng));
  }

  opt::BoxOptions box;
  box.max_iters = options.max_iters;
  box.ftol = options.tol;
  std::vector<opt::Constraint> constraints;
  if (map.needs_constraint())
    constraints.push_back([&map](std::span<const double> v, std::span<double> g) { return map.constraint(v, g); });

  double best_f = std::numeric_limits<double>::infinity();
  opt::OptResult best;
  int total_evals = 0;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    opt::OptResult r = constraints.empty()
                           ? opt::minimize_box(std::cref(objective), starts[k], map.lower(), map.upper(), box)
                           : opt::minimize_augmented_lagrangian(std::cref(objective), starts[k], map.lower(),
                                                                map.upper(), constraints, box);
    total_evals += r.evaluations;
    if (std::isfinite(r.f) && r.f < best_f) {
      best_f = r.f;
      best = std::move(r);
      result.start_index = static_cast<int>(k);
    }
  }
  if (!std::isfinite(best_f)) throw FitError("fit: no start reached a finite likelihood");

  std::vector<double> v = best.x;
  for (int s = 0; s < dim; ++s) v[static_cast<std::size_t>(s)] = wrap_angle(v[static_cast<std::size_t>(s)]);
  result.model = map.to_model(v);
  if (family == Family::Uniform && !result.model.is_symmetric()) {
    // (mu_s + pi, -lambda_s) is the same density; report lambda_s >= 0
    std::vector<double> mu(result.model.mu().angles().begin(), result.model.mu().angles().end());
    std::vector<double> lam(result.model.lambda().begin(), result.model.lambda().end());
    for (std::size_t s = 0; s < lam.size(); ++s)
      if (lam[s] < 0.0) {
        mu[s] = wrap_angle(mu[s] + kPi);
        lam[s] = -lam[s];
      }
    result.model = SkewModel(TorusPoint(std::move(mu)), result.model.theta(), std::move(lam));
  }
  double ll = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w != 0.0) ll += w * result.model.log_density(data[i].angles());
  }
  result.log_lik = ll;
  result.converged = best.converged;
  result.n_evals = total_evals;
  result.iterations = best.iterations;
  result.boundary = map.on_boundary(v, kBoundaryTol);

  if (options.compute_covariance && !result.boundary) {
    try {
      const Eigen::MatrixXd info = fisher_information(result.model, include_lambda);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info);
      if (eig.eigenvalues().minCoeff() < kSingularInformation) {
        result.singular_information = true;
      } else {
        result.cov = info.inverse() / objective.total_weight();
      }
    } catch (const DomainError&) {
      result.singular_information = true;
    }
  }
  return result;
}

}  // namespace

std::vector<double> FitResult::std_errors() const {
  std::vector<double> out;
  if (!cov) return out;
  for (Eigen::Index i = 0; i < cov->rows(); ++i) out.push_back(std::sqrt(std::max(0.0, (*cov)(i, i))));
  return out;
}

std::vector<std::string> parameter_names(Family family, int dim, bool include_lambda) {
  std::vector<std::string> names;
  if (family == Family::Uniform && !include_lambda) return names;
  for (int s = 1; s <= dim; ++s) names.push_back("mu" + std::to_string(s));
  if (family != Family::Uniform) {
    for (int s = 1; s <= dim; ++s) names.push_back("kappa" + std::to_string(s));
    if (dim == 2) {
      names.emplace_back("r");
    } else {
      for (int i = 1; i <= dim; ++i)
        for (int j = i + 1; j <= dim; ++j) names.push_back("r" + std::to_string(i) + std::to_string(j));
    }
  }
  if (include_lambda)
    for (int s = 1; s <= dim; ++s) names.push_back("lambda" + std::to_string(s));
  return names;
}

std::size_t free_parameter_count(Family family, int dim, bool include_lambda) {
  return parameter_names(family, dim, include_lambda).size();
}

std::vector<double> natural_parameters(const SkewModel& model, bool include_lambda) {
  std::vector<double> out;
  if (model.family() == Family::Uniform && !include_lambda) return out;
  out = model.mu().values();
  const auto theta = model.theta().values();
  out.insert(out.end(), theta.begin(), theta.end());
  if (include_lambda) out.insert(out.end(), model.lambda().begin(), model.lambda().end());
  return out;
}

double log_likelihood(const SkewModel& model, std::span<const TorusPoint> data) {
  check_data(data, model.dim());
  double total = 0;
  for (const auto& x : data) {
    const double ld = model.log_density(x.angles());
    if (ld == kNegInf) return kNegInf;
    total += ld;
  }
  return total;
}

void observation_score(const SkewModel& model, std::span<const double> x, bool include_lambda,
                       std::span<double> out) {
  const auto d = static_cast<std::size_t>(model.dim());
  if (x.size() != d) throw DimensionError("observation_score: dimension mismatch");
  const bool uniform_sym = model.family() == Family::Uniform && !include_lambda;
  const std::size_t nt = model.theta().num_values();
  const std::size_t expected = uniform_sym ? 0 : d + nt + (include_lambda ? d : 0);
  if (out.size() != expected) throw DimensionError("observation_score: wrong output size");
  if (uniform_sym) return;
  double yb[8], gb[8];
  std::vector<double> yh, gh;
  std::span<double> y, gy;
  if (d <= 8) {
    y = std::span<double>(yb, d);
    gy = std::span<double>(gb, d);
  } else {
    yh.resize(d);
    gh.resize(d);
    y = yh;
    gy = gh;
  }
  for (std::size_t s = 0; s < d; ++s) y[s] = angle_diff(x[s], model.mu()[s]);
  model.base().log_density_grad_y(y, gy);
  const auto lambda = model.lambda();
  const double factor = model.skew_factor(y);
  for (std::size_t s = 0; s < d; ++s) out[s] = -gy[s] - lambda[s] * std::cos(y[s]) / factor;
  model.base().grad_theta(y, out.subspan(d, nt));
  if (include_lambda)
    for (std::size_t s = 0; s < d; ++s) out[d + nt + s] = std::sin(y[s]) / factor;
}

FitResult fit_mle(Family family, bool skewed, std::span<const TorusPoint> data, const FitOptions& options) {
  return fit_impl(family, skewed, data, {}, options);
}

FitResult fit_mle_weighted(Family family, bool skewed, std::span<const TorusPoint> data,
                           std::span<const double> weights, const FitOptions& options) {
  if (weights.empty()) throw DimensionError("fit_mle_weighted: weights required");
  return fit_impl(family, skewed, data, weights, options);
}

Eigen::MatrixXd fisher_information(const SkewModel& model, const numerics::QuadratureGrid& grid,
                                   bool include_lambda) {
  const auto d = static_cast<std::size_t>(model.dim());
  if (grid.dim() != model.dim()) throw DimensionError("fisher_information: grid dimension mismatch");
  const bool uniform_sym = model.family() == Family::Uniform && !include_lambda;
  if (uniform_sym) return Eigen::MatrixXd(0, 0);
  const std::size_t nt = model.theta().num_values();
  const std::size_t nl = include_lambda ? d : 0;
  const std::size_t np = d + nt + nl;
  const auto lambda = model.lambda();
  const BaseDensity& base = model.base();

  // Integrals accumulated over the grid (y is centred at mu):
  //   i0       = int f u u^T with u = (-d_y log f, d_theta log f)
  //   mumu     = int lj lk cj ck f / L
  //   mulam    = int lj cj sk f / L
  //   mutheta  = sum_s l_s int s_s (d_j log f)(d_theta log f) f  and  lj int cj (d_theta log f) f
  //   thth     = sum_s l_s int s_s (d_theta log f)(d_theta log f) f
  //   lamlam   = int sj sk f / L
  Eigen::MatrixXd i0 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d + nt), static_cast<Eigen::Index>(d + nt));
  Eigen::MatrixXd mumu = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  Eigen::MatrixXd mulam = mumu;
  Eigen::MatrixXd lamlam = mumu;
  Eigen::MatrixXd mutheta_a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(nt));
  Eigen::MatrixXd mutheta_b = mutheta_a;
  Eigen::MatrixXd thth = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nt), static_cast<Eigen::Index>(nt));
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));  // int cos(y_s) f

  std::vector<double> gy(d), gt(nt);
  Eigen::VectorXd u(static_cast<Eigen::Index>(d + nt));
  const double w = grid.weight();
  grid.for_each([&](std::span<const double> y) {
    const double f = std::exp(base.log_density_grad_y(y, gy));
    base.grad_theta(y, gt);
    double skew = 0;
    for (std::size_t s = 0; s < d; ++s) skew += lambda[s] * std::sin(y[s]);
    const double factor = 1.0 + skew;
    if (!(factor > 0.0) && include_lambda)
      throw DomainError("fisher_information: model must be interior (skewing factor vanishes)");
    const double fw = f * w;
    for (std::size_t s = 0; s < d; ++s) u[static_cast<Eigen::Index>(s)] = -gy[s];
    for (std::size_t k = 0; k < nt; ++k) u[static_cast<Eigen::Index>(d + k)] = gt[k];
    i0.noalias() += fw * u * u.transpose();
    for (std::size_t j = 0; j < d; ++j) {
      const auto ej = static_cast<Eigen::Index>(j);
      const double cj = std::cos(y[j]), sj = std::sin(y[j]);
      alpha[ej] += fw * cj;
      for (std::size_t k = 0; k < d; ++k) {
        const auto ek = static_cast<Eigen::Index>(k);
        const double ck = std::cos(y[k]), sk = std::sin(y[k]);
        mumu(ej, ek) += fw * lambda[j] * lambda[k] * cj * ck / factor;
        mulam(ej, ek) += fw * lambda[j] * cj * sk / factor;
        lamlam(ej, ek) += fw * sj * sk / factor;
      }
      for (std::size_t k = 0; k < nt; ++k) {
        const auto ek = static_cast<Eigen::Index>(k);
        mutheta_a(ej, ek) += fw * skew * gy[j] * gt[k];
        mutheta_b(ej, ek) += fw * lambda[j] * cj * gt[k];
      }
    }
    for (std::size_t a = 0; a < nt; ++a)
      for (std::size_t b = 0; b < nt; ++b)
        thth(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += fw * skew * gt[a] * gt[b];
  });

  const auto ed = static_cast<Eigen::Index>(d);
  const auto et = static_cast<Eigen::Index>(nt);
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(np));
  // mu-mu
  info.topLeftCorner(ed, ed) = i0.topLeftCorner(ed, ed) + mumu;
  // mu-theta: base block plus the skewing corrections
  const Eigen::MatrixXd mt = i0.topRightCorner(ed, et) - mutheta_a - mutheta_b;
  info.block(0, ed, ed, et) = mt;
  info.block(ed, 0, et, ed) = mt.transpose();
  // theta-theta
  info.block(ed, ed, et, et) = i0.bottomRightCorner(et, et) + thth;
  if (include_lambda) {
    const auto el = static_cast<Eigen::Index>(nl);
    Eigen::MatrixXd ml = -mulam;
    for (Eigen::Index j = 0; j < ed; ++j) ml(j, j) += alpha[j];
    info.block(0, ed + et, ed, el) = ml;
    info.block(ed + et, 0, el, ed) = ml.transpose();
    info.block(ed + et, ed + et, el, el) = lamlam;
    // the lambda-theta block is identically zero
  }
  return 0.5 * (info + info.transpose());
}

Eigen::MatrixXd fisher_information(const SkewModel& model, bool include_lambda) {
  return fisher_information(model, numerics::QuadratureGrid::standard(model.dim()), include_lambda);
}

SymmetryTestResult likelihood_ratio_symmetry(double log_lik_symmetric, double log_lik_skewed, int df) {
  if (df < 1) throw DomainError("likelihood ratio: df must be positive");
  if (!std::isfinite(log_lik_symmetric) || !std::isfinite(log_lik_skewed))
    throw FitError("likelihood ratio: log-likelihoods must be finite");
  SymmetryTestResult out;
  out.log_lik_symmetric = log_lik_symmetric;
  out.log_lik_skewed = log_lik_skewed;
  out.df = df;
  double stat = -2.0 * (log_lik_symmetric - log_lik_skewed);
  if (stat < 0.0) {
    if (stat < -kLrtSlack) throw FitError("likelihood ratio: skewed fit is worse than the symmetric fit");
    stat = 0.0;
  }
  out.statistic = stat;
  out.p_value = numerics::chi_square_sf(stat, df);
  for (double alpha : {0.10, 0.05, 0.01})
    out.reject_at[alpha] = stat > numerics::chi_square_quantile(1.0 - alpha, df);
  return out;
}

SymmetryTestReport symmetry_test(Family family, std::span<const TorusPoint> data, const FitOptions& options) {
  FitOptions sym_opts = options;
  sym_opts.fix_lambda_zero = true;
  FitResult sym = fit_mle(family, false, data, sym_opts);
  FitOptions skew_opts = options;
  skew_opts.fix_lambda_zero = false;
  skew_opts.extra_starts.insert(skew_opts.extra_starts.begin(), sym.model);
  FitResult skewed = fit_mle(family, true, data, skew_opts);
  const int df = sym.model.dim();
  SymmetryTestResult test = likelihood_ratio_symmetry(sym.log_lik, skewed.log_lik, df);
  return SymmetryTestReport{test, std::move(sym), std::move(skewed)};
}

}  // namespace skewtorus
