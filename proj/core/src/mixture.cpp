#include "skewtorus/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "parameter_map.hpp"
#include "skewtorus/errors.hpp"
#include "skewtorus/optimizer.hpp"

namespace skewtorus {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMinWeight = 1e-4;

struct Degenerate {};

}  // namespace

MixtureModel::MixtureModel(std::vector<SkewModel> components, std::vector<double> weights)
    : components_(std::move(components)), weights_(std::move(weights)) {
  if (components_.empty()) throw DimensionError("mixture: at least one component required");
  if (weights_.size() != components_.size()) throw DimensionError("mixture: one weight per component required");
  double total = 0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("mixture: weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("mixture: weights must sum to 1");
  for (double& w : weights_) w /= total;
  for (const auto& c : components_)
    if (c.family() != components_.front().family() || c.dim() != components_.front().dim())
      throw DimensionError("mixture: components must share family and dimension");
}

double MixtureModel::log_density(std::span<const double> x) const {
  double out = kNegInf;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    if (weights_[k] == 0.0) continue;
    out = numerics::log_add_exp(out, std::log(weights_[k]) + components_[k].log_density(x));
  }
  return out;
}

double mixture_log_density(const MixtureModel& mix, const TorusPoint& x) {
  if (x.dim() != static_cast<std::size_t>(mix.dim())) throw DimensionError("mixture: dimension mismatch");
  return mix.log_density(x.angles());
}

double mixture_log_likelihood(const MixtureModel& mix, std::span<const TorusPoint> data) {
  double total = 0;
  for (const auto& x : data) {
    const double ld = mixture_log_density(mix, x);
    if (ld == kNegInf) return kNegInf;
    total += ld;
  }
  return total;
}

std::vector<TorusPoint> sample(const MixtureModel& mix, std::size_t n, Rng& rng) {
  if (n == 0) throw DomainError("sample: n must be positive");
  const std::size_t k = mix.size();
  std::vector<std::size_t> label(n);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.uniform();
    std::size_t c = 0;
    while (c + 1 < k && u >= mix.weights()[c]) u -= mix.weights()[c++];
    label[i] = c;
    ++counts[c];
  }
  std::vector<std::vector<TorusPoint>> draws(k);
  for (std::size_t c = 0; c < k; ++c)
    if (counts[c] > 0) draws[c] = sample(mix.components()[c], counts[c], rng);
  std::vector<std::size_t> next(k, 0);
  std::vector<TorusPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::move(draws[label[i]][next[label[i]]++]));
  return out;
}

ModelScore ModelScore::from(double log_lik, int k_params, std::size_t n) {
  ModelScore s;
  s.log_lik = log_lik;
  s.k_params = k_params;
  s.n = n;
  s.aic = 2.0 * k_params - 2.0 * log_lik;
  s.bic = k_params * std::log(static_cast<double>(n)) - 2.0 * log_lik;
  return s;
}

int component_param_count(Family family, int dim, bool skewed) {
  if (dim < 1) throw DimensionError("dimension must be positive");
  if (family == Family::Uniform) return skewed ? 2 * dim : 0;
  if (family == Family::WrappedCauchy && dim != 2) throw DimensionError("wrapped Cauchy: bivariate only");
  const int full = dim * (dim + 5) / 2;
  return skewed ? full : full - dim;
}

int mixture_param_count(Family family, int dim, bool skewed, int components) {
  if (components < 1) throw DomainError("mixture: at least one component required");
  return components * component_param_count(family, dim, skewed) + (components - 1);
}

std::vector<int> angular_kmeans(std::span<const TorusPoint> data, int k, Rng& rng, int max_iters) {
  if (k < 1) throw DomainError("kmeans: k must be positive");
  if (data.size() < static_cast<std::size_t>(k)) throw DomainError("kmeans: fewer points than clusters");
  const std::size_t n = data.size();
  const std::size_t d = data.front().dim();
  const std::size_t m = 2 * d;
  std::vector<double> emb(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t s = 0; s < d; ++s) {
      emb[i * m + 2 * s] = std::cos(data[i][s]);
      emb[i * m + 2 * s + 1] = std::sin(data[i][s]);
    }
  const auto uk = static_cast<std::size_t>(k);
  std::vector<double> centres(uk * m);
  auto dist2 = [&](std::size_t i, std::size_t c) {
    double t = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const double diff = emb[i * m + j] - centres[c * m + j];
      t += diff * diff;
    }
    return t;
  };
  auto set_centre = [&](std::size_t c, std::size_t i) {
    std::copy_n(emb.begin() + static_cast<std::ptrdiff_t>(i * m), m, centres.begin() + static_cast<std::ptrdiff_t>(c * m));
  };

  // k-means++ seeding
  set_centre(0, static_cast<std::size_t>(rng.below(n)));
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < uk; ++c) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      best[i] = std::min(best[i], dist2(i, c - 1));
      total += best[i];
    }
    std::size_t pick = static_cast<std::size_t>(rng.below(n));
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        u -= best[i];
        if (u < 0.0) {
          pick = i;
          break;
        }
      }
    }
    set_centre(c, pick);
  }

  std::vector<int> label(n, -1);
  for (int it = 0; it < max_iters; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t arg = 0;
      double bd = dist2(i, 0);
      for (std::size_t c = 1; c < uk; ++c) {
        const double dc = dist2(i, c);
        if (dc < bd) {
          bd = dc;
          arg = c;
        }
      }
      if (label[i] != static_cast<int>(arg)) {
        label[i] = static_cast<int>(arg);
        changed = true;
      }
    }
    std::vector<std::size_t> counts(uk, 0);
    std::fill(centres.begin(), centres.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(label[i]);
      ++counts[c];
      for (std::size_t j = 0; j < m; ++j) centres[c * m + j] += emb[i * m + j];
    }
    for (std::size_t c = 0; c < uk; ++c) {
      if (counts[c] == 0) {
        // re-seed an empty cluster at the point farthest from its centre
        std::size_t far = 0;
        double fd = -1;
        for (std::size_t i = 0; i < n; ++i) {
          const double di = dist2(i, static_cast<std::size_t>(label[i]));
          if (di > fd) {
            fd = di;
            far = i;
          }
        }
        set_centre(c, far);
        label[far] = static_cast<int>(c);
        changed = true;
        continue;
      }
      for (std::size_t j = 0; j < m; ++j) centres[c * m + j] /= static_cast<double>(counts[c]);
    }
    if (!changed) break;
  }
  return label;
}

namespace {

FitOptions m_step_options(const MixtureFitOptions& options, const SkewModel& warm) {
  FitOptions o;
  o.n_starts = 0;
  o.moment_start = false;
  o.extra_starts = {warm};
  o.max_iters = options.m_step_iters;
  o.tol = options.tol;
  o.compute_covariance = false;
  return o;
}

struct EmRun {
  std::optional<MixtureModel> model;
  double log_lik = kNegInf;
  bool converged = false;
  int iterations = 0;
  std::vector<double> trace;
};

// Runs EM from a starting mixture. Throws Degenerate when a component collapses.
EmRun run_em(const MixtureModel& start, bool skewed, std::span<const TorusPoint> data,
             const MixtureFitOptions& options) {
  const std::size_t n = data.size();
  const std::size_t k = start.size();
  const Family family = start.family();
  const double min_effective = component_param_count(family, start.dim(), skewed) + 2.0;
  std::vector<SkewModel> comps = start.components();
  std::vector<double> weights = start.weights();
  std::vector<std::vector<double>> resp(k, std::vector<double>(n));

  auto e_step = [&]() {
    double ll = 0;
    std::vector<double> lp(k);
    for (std::size_t i = 0; i < n; ++i) {
      double total = kNegInf;
      for (std::size_t c = 0; c < k; ++c) {
        lp[c] = weights[c] > 0.0 ? std::log(weights[c]) + comps[c].log_density(data[i].angles()) : kNegInf;
        total = numerics::log_add_exp(total, lp[c]);
      }
      if (total == kNegInf) return kNegInf;
      ll += total;
      for (std::size_t c = 0; c < k; ++c) resp[c][i] = std::exp(lp[c] - total);
    }
    return ll;
  };

  EmRun run;
  double ll = e_step();
  if (ll == kNegInf) throw Degenerate{};
  for (int it = 0; it < options.max_em_iters; ++it) {
    for (std::size_t c = 0; c < k; ++c) {
      const double eff = std::accumulate(resp[c].begin(), resp[c].end(), 0.0);
      weights[c] = eff / static_cast<double>(n);
      if (weights[c] < kMinWeight || eff < min_effective) throw Degenerate{};
      const FitResult fit = fit_mle_weighted(family, skewed, data, resp[c], m_step_options(options, comps[c]));
      comps[c] = fit.model;
    }
    const double next = e_step();
    if (next == kNegInf) throw Degenerate{};
    run.trace.push_back(next);
    run.iterations = it + 1;
    const double change = std::abs(next - ll) / std::max(1.0, std::abs(ll));
    ll = next;
    if (change < options.tol) {
      run.converged = true;
      break;
    }
  }
  run.log_lik = ll;
  run.model.emplace(std::move(comps), std::move(weights));
  return run;
}

MixtureModel start_from_partition(Family family, bool skewed, std::span<const TorusPoint> data,
                                  const std::vector<int>& labels, int components,
                                  const MixtureFitOptions& options) {
  const std::size_t n = data.size();
  std::vector<SkewModel> comps;
  std::vector<double> weights;
  for (int c = 0; c < components; ++c) {
    std::vector<double> w(n, 0.0);
    double count = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (labels[i] == c) {
        w[i] = 1.0;
        ++count;
      }
    if (count < component_param_count(family, static_cast<int>(data.front().dim()), skewed) + 2.0)
      throw Degenerate{};
    FitOptions o;
    o.n_starts = 1;
    o.moment_start = true;
    o.max_iters = options.m_step_iters;
    o.tol = options.tol;
    o.compute_covariance = false;
    comps.push_back(fit_mle_weighted(family, skewed, data, w, o).model);
    weights.push_back(count / static_cast<double>(n));
  }
  return MixtureModel(std::move(comps), std::move(weights));
}

}  // namespace

MixtureFitResult fit_mixture(Family family, bool skewed, int components, std::span<const TorusPoint> data,
                             const MixtureFitOptions& options) {
  if (components < 1) throw DomainError("fit_mixture: at least one component required");
  if (data.empty()) throw DimensionError("fit_mixture: empty sample");
  const int dim = static_cast<int>(data.front().dim());
  for (const auto& x : data)
    if (x.dim() != static_cast<std::size_t>(dim)) throw DimensionError("fit_mixture: mixed dimensions");
  const int k_params = mixture_param_count(family, dim, skewed, components);
  if (data.size() < static_cast<std::size_t>(components * component_param_count(family, dim, skewed) + components))
    throw DomainError("fit_mixture: sample too small for the mixture");

  if (components == 1) {
    const FitResult fit = fit_mle(family, skewed, data, options.single);
    MixtureFitResult out{MixtureModel({fit.model}, {1.0}), ModelScore::from(fit.log_lik, k_params, data.size()),
                         fit.converged, 0, {fit.log_lik}, fit.start_index};
    return out;
  }

  std::optional<EmRun> best;
  int best_index = 0;
  int index = 0;
  for (const auto& start : options.extra_starts) {
    try {
      EmRun run = run_em(start, skewed, data, options);
      if (!best || run.log_lik > best->log_lik) {
        best = std::move(run);
        best_index = index;
      }
    } catch (const Degenerate&) {
    }
    ++index;
  }
  for (int p = 0; p < options.n_partitions; ++p, ++index) {
    for (int attempt = 0; attempt <= options.max_restarts; ++attempt) {
      Rng rng = Rng::substream(options.seed,
                               static_cast<std::uint64_t>(p) * static_cast<std::uint64_t>(options.max_restarts + 1) +
                                   static_cast<std::uint64_t>(attempt));
      try {
        const auto labels = angular_kmeans(data, components, rng);
        const MixtureModel start = start_from_partition(family, skewed, data, labels, components, options);
        EmRun run = run_em(start, skewed, data, options);
        if (!best || run.log_lik > best->log_lik) {
          best = std::move(run);
          best_index = index;
        }
        break;
      } catch (const Degenerate&) {
      }
    }
  }
  if (!best) throw FitError("fit_mixture: every start produced a degenerate component");
  return MixtureFitResult{std::move(*best->model), ModelScore::from(best->log_lik, k_params, data.size()),
                          best->converged, best->iterations, std::move(best->trace), best_index};
}

MixtureFitResult fit_mixture_direct(const MixtureModel& start, bool skewed, std::span<const TorusPoint> data,
                                    int max_iters, double tol) {
  if (data.empty()) throw DimensionError("fit_mixture_direct: empty sample");
  const std::size_t k = start.size();
  const int dim = start.dim();
  const detail::ParameterMap map(start.family(), dim, skewed);
  const std::size_t nv = map.var_count();
  const std::size_t nn = map.natural_count();

  std::vector<double> x0, lower, upper;
  for (const auto& c : start.components()) {
    const auto v = map.from_model(skewed ? c : SkewModel::symmetric(c.mu(), c.theta()));
    x0.insert(x0.end(), v.begin(), v.end());
    lower.insert(lower.end(), map.lower().begin(), map.lower().end());
    upper.insert(upper.end(), map.upper().begin(), map.upper().end());
  }
  // stick-breaking fractions
  double remaining = 1.0;
  for (std::size_t c = 0; c + 1 < k; ++c) {
    const double frac = remaining > 0.0 ? std::clamp(start.weights()[c] / remaining, 0.0, 1.0) : 0.0;
    x0.push_back(frac);
    remaining -= start.weights()[c];
    lower.push_back(0.0);
    upper.push_back(1.0);
  }

  auto weights_of = [k, nv](std::span<const double> x) {
    std::vector<double> w(k);
    double rest = 1.0;
    for (std::size_t c = 0; c + 1 < k; ++c) {
      const double v = x[k * nv + c];
      w[c] = rest * v;
      rest *= 1.0 - v;
    }
    w[k - 1] = rest;
    return w;
  };

  const double n = static_cast<double>(data.size());
  opt::Objective objective = [&](std::span<const double> x, std::span<double> grad) {
    std::vector<SkewModel> comps;
    try {
      for (std::size_t c = 0; c < k; ++c) comps.push_back(map.to_model(x.subspan(c * nv, nv)));
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    } catch (const ConvergenceError&) {
      return std::numeric_limits<double>::infinity();
    }
    const auto w = weights_of(x);
    std::fill(grad.begin(), grad.end(), 0.0);
    std::vector<double> nat(k * nn, 0.0), score(nn), lp(k), dw(k, 0.0);
    double ll = 0;
    for (const auto& pt : data) {
      double total = kNegInf;
      for (std::size_t c = 0; c < k; ++c) {
        lp[c] = w[c] > 0.0 ? std::log(w[c]) + comps[c].log_density(pt.angles()) : kNegInf;
        total = numerics::log_add_exp(total, lp[c]);
      }
      if (total == kNegInf) return std::numeric_limits<double>::infinity();
      ll += total;
      for (std::size_t c = 0; c < k; ++c) {
        if (lp[c] == kNegInf) continue;
        const double r = std::exp(lp[c] - total);
        dw[c] += r / w[c];
        observation_score(comps[c], pt.angles(), skewed, score);
        for (std::size_t j = 0; j < nn; ++j) nat[c * nn + j] += r * score[j];
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      std::vector<double> ng(nat.begin() + static_cast<std::ptrdiff_t>(c * nn),
                             nat.begin() + static_cast<std::ptrdiff_t>((c + 1) * nn));
      for (double& g : ng) g = -g / n;
      map.chain(ng, grad.subspan(c * nv, nv));
    }
    // weights: w_c = v_c prod_{i<c} (1 - v_i); the last component takes the remainder
    for (std::size_t j = 0; j + 1 < k; ++j) {
      double g = 0;
      for (std::size_t c = j; c < k; ++c) {
        double dwc = c == j ? 1.0 : -1.0;
        for (std::size_t i = 0; i < c; ++i)
          if (i != j) dwc *= 1.0 - x[k * nv + i];
        if (c != j && c + 1 < k) dwc *= x[k * nv + c];
        g += dw[c] * dwc;
      }
      grad[k * nv + j] = -g / n;
    }
    return -ll / n;
  };

  std::vector<opt::Constraint> constraints;
  if (map.needs_constraint())
    for (std::size_t c = 0; c < k; ++c)
      constraints.push_back([&map, c, nv](std::span<const double> x, std::span<double> g) {
        std::fill(g.begin(), g.end(), 0.0);
        std::vector<double> local(nv);
        const double v = map.constraint(x.subspan(c * nv, nv), local);
        std::copy(local.begin(), local.end(), g.begin() + static_cast<std::ptrdiff_t>(c * nv));
        return v;
      });

  opt::BoxOptions box;
  box.max_iters = max_iters;
  box.ftol = tol;
  const opt::OptResult r = opt::minimize_augmented_lagrangian(objective, x0, lower, upper, constraints, box);
  if (!std::isfinite(r.f)) throw FitError("fit_mixture_direct: start has zero likelihood");
  std::vector<SkewModel> comps;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> v(r.x.begin() + static_cast<std::ptrdiff_t>(c * nv),
                          r.x.begin() + static_cast<std::ptrdiff_t>((c + 1) * nv));
    for (int s = 0; s < dim; ++s) v[static_cast<std::size_t>(s)] = wrap_angle(v[static_cast<std::size_t>(s)]);
    comps.push_back(map.to_model(v));
  }
  MixtureModel model(std::move(comps), weights_of(r.x));
  const double ll = mixture_log_likelihood(model, data);
  return MixtureFitResult{std::move(model),
                          ModelScore::from(ll, mixture_param_count(start.family(), dim, skewed, static_cast<int>(k)),
                                           data.size()),
                          r.converged, r.iterations, {ll}, 0};
}

ModelRanking select_model(std::span<const std::pair<std::string, ModelScore>> scores) {
  if (scores.empty()) throw std::invalid_argument("select_model: no candidates");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto rank = [&](auto key) {
    auto order = idx;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double ka = key(scores[a].second), kb = key(scores[b].second);
      if (ka != kb) return ka < kb;
      if (scores[a].second.k_params != scores[b].second.k_params)
        return scores[a].second.k_params < scores[b].second.k_params;
      return scores[a].first < scores[b].first;
    });
    std::vector<std::string> names;
    for (std::size_t i : order) names.push_back(scores[i].first);
    return names;
  };
  ModelRanking out;
  out.by_aic = rank([](const ModelScore& s) { return s.aic; });
  out.by_bic = rank([](const ModelScore& s) { return s.bic; });
  out.criteria_disagree = out.by_aic.front() != out.by_bic.front();
  return out;
}

}  // namespace skewtorus
