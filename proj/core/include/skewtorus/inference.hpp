#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "skewtorus/angles.hpp"
#include "skewtorus/families.hpp"
#include "skewtorus/numerics.hpp"
#include "skewtorus/skew.hpp"

namespace skewtorus {

struct FitOptions {
  int n_starts = 20;
  int max_iters = 500;
  /// Relative log-likelihood change used as the stopping rule.
  double tol = 1e-8;
  /// Fit the symmetric submodel (lambda = 0).
  bool fix_lambda_zero = false;
  std::uint64_t seed = 0x5eed5eedULL;
  /// Additional starting models tried before the generated starts.
  std::vector<SkewModel> extra_starts;
  /// Include the circular-moment start. Jittered starts fill the remainder of n_starts.
  bool moment_start = true;
  /// Compute the asymptotic covariance at the optimum.
  bool compute_covariance = true;
};

struct FitResult {
  SkewModel model;
  double log_lik = 0;
  /// Inverse Fisher information divided by n, in parameter_names() order;
  /// absent at boundary optima or when the information is singular.
  std::optional<Eigen::MatrixXd> cov;
  bool boundary = false;
  bool singular_information = false;
  bool converged = false;
  int n_evals = 0;
  int iterations = 0;
  int start_index = 0;
  std::vector<std::string> param_names;

  /// Square roots of the covariance diagonal (empty when cov is absent).
  std::vector<double> std_errors() const;
};

/// Free parameters in the fixed order mu_1..mu_d, theta values, lambda_1..lambda_d.
/// The symmetric uniform model has no free parameters.
std::vector<double> natural_parameters(const SkewModel& model, bool include_lambda);
std::vector<std::string> parameter_names(Family family, int dim, bool include_lambda);
std::size_t free_parameter_count(Family family, int dim, bool include_lambda);

/// Sum of skew_log_density over the sample; -inf if any point has zero density.
double log_likelihood(const SkewModel& model, std::span<const TorusPoint> data);

/// Per-observation score d/dparam log g(x) in natural_parameters() order.
void observation_score(const SkewModel& model, std::span<const double> x, bool include_lambda,
                       std::span<double> out);

/// Constrained maximum likelihood with multiple starts. Throws FitError when
/// no start reaches a finite likelihood, DomainError when the sample is too
/// small for the model.
FitResult fit_mle(Family family, bool skewed, std::span<const TorusPoint> data,
                  const FitOptions& options = {});

/// Weighted variant (weights >= 0, not all zero) used by mixture M-steps.
FitResult fit_mle_weighted(Family family, bool skewed, std::span<const TorusPoint> data,
                           std::span<const double> weights, const FitOptions& options);

/// Per-observation Fisher information in natural_parameters() order,
/// assembled block by block (mu-mu, mu-theta, mu-lambda, theta-theta,
/// lambda-lambda; theta-lambda is identically zero) with all integrals by
/// torus quadrature.
Eigen::MatrixXd fisher_information(const SkewModel& model, const numerics::QuadratureGrid& grid,
                                   bool include_lambda = true);
Eigen::MatrixXd fisher_information(const SkewModel& model, bool include_lambda = true);

/// Smallest eigenvalue below this marks the information as singular.
inline constexpr double kSingularInformation = 1e-10;

struct SymmetryTestResult {
  double statistic = 0;
  int df = 0;
  double p_value = 1;
  std::map<double, bool> reject_at;
  double log_lik_symmetric = 0;
  double log_lik_skewed = 0;
};

/// Likelihood-ratio statistic from two maximised log-likelihoods. Raw values
/// in [-1e-6, 0) are clamped to zero; anything lower throws FitError.
SymmetryTestResult likelihood_ratio_symmetry(double log_lik_symmetric, double log_lik_skewed,
                                             int df);

struct SymmetryTestReport {
  SymmetryTestResult test;
  FitResult symmetric_fit;
  FitResult skewed_fit;
};

/// Fits the symmetric and skewed models (the skewed fit also starts from the
/// symmetric optimum) and tests lambda = 0 against chi^2_d.
SymmetryTestReport symmetry_test(Family family, std::span<const TorusPoint> data,
                                 const FitOptions& options = {});

}  // namespace skewtorus
