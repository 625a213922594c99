#include "skewtorus/angles.hpp"

#include <cmath>
#include <stdexcept>

#include "skewtorus/errors.hpp"

namespace skewtorus {

double wrap_angle(double angle) {
  if (!std::isfinite(angle)) throw DomainError("wrap_angle: non-finite angle");
  if (angle >= -kPi && angle < kPi) return angle;
  double w = angle - kTwoPi * std::floor((angle + kPi) / kTwoPi);
  // floor rounding can leave w a hair outside the half-open interval
  if (w >= kPi) w -= kTwoPi;
  if (w < -kPi) w += kTwoPi;
  return w;
}

TorusPoint::TorusPoint(std::vector<double> angles) : angles_(std::move(angles)) {
  for (double& a : angles_) a = wrap_angle(a);
}

TorusPoint::TorusPoint(std::initializer_list<double> angles)
    : TorusPoint(std::vector<double>(angles)) {}

TorusPoint TorusPoint::zeros(std::size_t dim) { return TorusPoint(std::vector<double>(dim, 0.0)); }

double torus_distance(const TorusPoint& a, const TorusPoint& b) {
  if (a.dim() != b.dim()) throw DimensionError("torus_distance: dimension mismatch");
  double sum = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = angle_diff(a[i], b[i]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace skewtorus
