#pragma once

#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <vector>

namespace skewtorus {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps any finite angle onto [-pi, pi).
double wrap_angle(double angle);

/// Shortest signed difference a - b on the circle, in [-pi, pi).
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

/// A point on the d-torus. Coordinates are wrapped to [-pi, pi) on
/// construction, so every TorusPoint in the library is canonical.
class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(std::vector<double> angles);
  TorusPoint(std::initializer_list<double> angles);

  /// Origin of the d-torus.
  static TorusPoint zeros(std::size_t dim);

  std::size_t dim() const { return angles_.size(); }
  double operator[](std::size_t i) const { return angles_[i]; }
  std::span<const double> angles() const { return angles_; }
  const std::vector<double>& values() const { return angles_; }

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

 private:
  std::vector<double> angles_;
};

/// Geodesic (per-coordinate wrapped) Euclidean distance on the torus.
double torus_distance(const TorusPoint& a, const TorusPoint& b);

}  // namespace skewtorus
