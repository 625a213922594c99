#include "parameter_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skewtorus/errors.hpp"

namespace skewtorus::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kKappaMin = 1e-6;
constexpr double kKappaMax = 1e4;
constexpr double kDepMax = 1e4;
constexpr double kWcEdge = 1e-6;

std::size_t theta_size(Family family, int dim) {
  switch (family) {
    case Family::Uniform: return 0;
    case Family::WrappedCauchy:
      if (dim != 2) throw DimensionError("wrapped Cauchy: bivariate only");
      return 3;
    default: return static_cast<std::size_t>(dim) + dependence_count(dim);
  }
}

}  // namespace

ParameterMap::ParameterMap(Family family, int dim, bool skewed)
    : family_(family), dim_(dim), skewed_(skewed) {
  if (dim < 1) throw DimensionError("dimension must be positive");
  const auto d = static_cast<std::size_t>(dim);
  theta_count_ = theta_size(family, dim);
  natural_count_ = d + theta_count_ + (skewed ? d : 0);
  const std::size_t lambda_vars = !skewed ? 0 : (dim <= 2 ? d : 2 * d);
  var_count_ = d + theta_count_ + lambda_vars;
  lower_.assign(var_count_, -kInf);
  upper_.assign(var_count_, kInf);
  for (std::size_t k = 0; k < theta_count_; ++k) {
    const std::size_t i = d + k;
    if (family == Family::WrappedCauchy) {
      if (k < 2) {
        lower_[i] = 0.0;
        upper_[i] = 1.0 - kWcEdge;
      } else {
        lower_[i] = -1.0 + kWcEdge;
        upper_[i] = 1.0 - kWcEdge;
      }
    } else if (k < d) {
      lower_[i] = kKappaMin;
      upper_[i] = kKappaMax;
    } else {
      lower_[i] = -kDepMax;
      upper_[i] = kDepMax;
    }
  }
  for (std::size_t i = d + theta_count_; i < var_count_; ++i) {
    lower_[i] = dim <= 2 ? -1.0 : 0.0;
    upper_[i] = 1.0;
  }
}

SkewModel ParameterMap::to_model(std::span<const double> v) const {
  const auto d = static_cast<std::size_t>(dim_);
  std::vector<double> mu(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(d));
  FamilyParams theta = FamilyParams::from_values(family_, dim_, v.subspan(d, theta_count_));
  std::vector<double> lambda(d, 0.0);
  if (skewed_) {
    const auto lv = v.subspan(d + theta_count_);
    if (dim_ == 1) {
      lambda[0] = std::clamp(lv[0], -1.0, 1.0);
    } else if (dim_ == 2) {
      lambda[0] = 0.5 * (lv[0] + lv[1]);
      lambda[1] = 0.5 * (lv[0] - lv[1]);
    } else {
      double total = 0;
      for (std::size_t s = 0; s < d; ++s) {
        lambda[s] = lv[s] - lv[d + s];
        total += std::abs(lambda[s]);
      }
      if (total > 1.0)
        for (double& l : lambda) l /= total;
    }
  }
  return SkewModel(TorusPoint(std::move(mu)), std::move(theta), std::move(lambda));
}

std::vector<double> ParameterMap::from_model(const SkewModel& model) const {
  if (model.family() != family_ || model.dim() != dim_)
    throw DimensionError("start model does not match the fitted family");
  const auto d = static_cast<std::size_t>(dim_);
  std::vector<double> v(model.mu().values());
  const auto theta = model.theta().values();
  v.insert(v.end(), theta.begin(), theta.end());
  if (skewed_) {
    const auto lambda = model.lambda();
    if (dim_ == 1) {
      v.push_back(lambda[0]);
    } else if (dim_ == 2) {
      v.push_back(lambda[0] + lambda[1]);
      v.push_back(lambda[0] - lambda[1]);
    } else {
      for (std::size_t s = 0; s < d; ++s) v.push_back(std::max(lambda[s], 0.0));
      for (std::size_t s = 0; s < d; ++s) v.push_back(std::max(-lambda[s], 0.0));
    }
  }
  clamp(v);
  return v;
}

void ParameterMap::chain(std::span<const double> natural_grad, std::span<double> var_grad) const {
  const auto d = static_cast<std::size_t>(dim_);
  const std::size_t head = d + theta_count_;
  std::copy(natural_grad.begin(), natural_grad.begin() + static_cast<std::ptrdiff_t>(head), var_grad.begin());
  if (!skewed_) return;
  const auto gl = natural_grad.subspan(head, d);
  auto out = var_grad.subspan(head);
  if (dim_ == 1) {
    out[0] = gl[0];
  } else if (dim_ == 2) {
    out[0] = 0.5 * (gl[0] + gl[1]);
    out[1] = 0.5 * (gl[0] - gl[1]);
  } else {
    for (std::size_t s = 0; s < d; ++s) {
      out[s] = gl[s];
      out[d + s] = -gl[s];
    }
  }
}

double ParameterMap::constraint(std::span<const double> v, std::span<double> grad) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  const auto d = static_cast<std::size_t>(dim_);
  const std::size_t head = d + theta_count_;
  double total = -1.0;
  for (std::size_t i = head; i < var_count_; ++i) {
    total += v[i];
    grad[i] = 1.0;
  }
  return total;
}

bool ParameterMap::on_boundary(std::span<const double> v, double tol) const {
  const auto d = static_cast<std::size_t>(dim_);
  for (std::size_t i = d; i < var_count_; ++i) {
    if (dim_ >= 3 && skewed_ && i >= d + theta_count_) continue;
    if (v[i] - lower_[i] <= tol || upper_[i] - v[i] <= tol) return true;
  }
  if (dim_ >= 3 && skewed_) {
    double total = 0;
    for (std::size_t s = 0; s < d; ++s) total += std::abs(v[d + theta_count_ + s] - v[d + theta_count_ + d + s]);
    if (total >= 1.0 - tol) return true;
  }
  return false;
}

void ParameterMap::clamp(std::span<double> v) const {
  for (std::size_t i = 0; i < var_count_; ++i) v[i] = std::clamp(v[i], lower_[i], upper_[i]);
}

}  // namespace skewtorus::detail
