#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "skewtorus/inference.hpp"
#include "skewtorus/random.hpp"
#include "skewtorus/skew.hpp"

namespace skewtorus {

class MixtureModel {
 public:
  MixtureModel(std::vector<SkewModel> components, std::vector<double> weights);

  const std::vector<SkewModel>& components() const { return components_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return components_.size(); }
  int dim() const { return components_.front().dim(); }
  Family family() const { return components_.front().family(); }

  double log_density(std::span<const double> x) const;

 private:
  std::vector<SkewModel> components_;
  std::vector<double> weights_;
};

double mixture_log_density(const MixtureModel& mix, const TorusPoint& x);
double mixture_log_likelihood(const MixtureModel& mix, std::span<const TorusPoint> data);
std::vector<TorusPoint> sample(const MixtureModel& mix, std::size_t n, Rng& rng);

struct ModelScore {
  double log_lik = 0;
  int k_params = 0;
  double aic = 0;
  double bic = 0;
  std::size_t n = 0;

  static ModelScore from(double log_lik, int k_params, std::size_t n);
};

/// Free parameters of one component: d(d+5)/2 for skewed non-uniform
/// families, d(d+5)/2 - d for their symmetric versions, 2d for the skewed
/// uniform and 0 for the symmetric uniform.
int component_param_count(Family family, int dim, bool skewed);
/// K * component_param_count + (K - 1) mixing weights.
int mixture_param_count(Family family, int dim, bool skewed, int components);

struct MixtureFitOptions {
  /// Angular k-means partitions tried as EM starts.
  int n_partitions = 5;
  int max_em_iters = 500;
  /// Relative log-likelihood change stopping rule.
  double tol = 1e-8;
  /// Optimiser iterations per component M-step.
  int m_step_iters = 100;
  /// Fresh partitions drawn when a start degenerates.
  int max_restarts = 5;
  std::uint64_t seed = 0x6d69787475726531ULL;
  /// Extra EM starts (e.g. a fitted symmetric mixture when fitting the skewed one).
  std::vector<MixtureModel> extra_starts;
  /// Options for K = 1, which delegates to fit_mle.
  FitOptions single;
};

struct MixtureFitResult {
  MixtureModel model;
  ModelScore score;
  bool converged = false;
  int em_iterations = 0;
  /// Observed-data log-likelihood after every EM iteration of the winning start.
  std::vector<double> trace;
  int start_index = 0;
};

/// Expectation-maximisation with constrained weighted M-steps. Throws
/// FitError if every start degenerates (weight < 1e-4 or a component with
/// effective size below its parameter count + 2).
MixtureFitResult fit_mixture(Family family, bool skewed, int components,
                             std::span<const TorusPoint> data,
                             const MixtureFitOptions& options = {});

/// Direct joint maximisation of the mixture likelihood from a given start
/// (weights via stick-breaking fractions in [0, 1]).
MixtureFitResult fit_mixture_direct(const MixtureModel& start, bool skewed,
                                    std::span<const TorusPoint> data, int max_iters = 1000,
                                    double tol = 1e-10);

/// Cluster labels from k-means on the (cos, sin) embedding of each angle
/// (chord distance on the torus), k-means++ seeding.
std::vector<int> angular_kmeans(std::span<const TorusPoint> data, int k, Rng& rng,
                                int max_iters = 100);

struct ModelRanking {
  std::vector<std::string> by_aic;
  std::vector<std::string> by_bic;
  /// Best models under AIC and BIC differ.
  bool criteria_disagree = false;
};

/// Ranks candidates by AIC and by BIC (ascending). Ties go to fewer
/// parameters, then to name order. Throws std::invalid_argument on empty input.
ModelRanking select_model(std::span<const std::pair<std::string, ModelScore>> scores);

}  // namespace skewtorus
