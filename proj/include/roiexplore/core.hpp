#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace roiex {

using Vec3 = Eigen::Vector3d;

// Thrown when the world is in a state an operation cannot proceed from,
// e.g. a sensor placed inside a solid obstacle.
class InvalidState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No feasible placement could be found for a trial.
class InfeasibleEnvironment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

/// Sensor or robot pose. Roll is fixed to zero; pitch is ignored in 2D.
struct Pose {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
  double pitch = 0.0;

  Pose() = default;
  Pose(const Vec3& p, double yaw_in, double pitch_in = 0.0)
      : position(p), yaw(wrap_angle(yaw_in)), pitch(pitch_in) {}

  Vec3 forward() const {
    return {std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw), std::sin(pitch)};
  }
  Vec3 left() const { return {-std::sin(yaw), std::cos(yaw), 0.0}; }
  Vec3 up() const {
    return {-std::sin(pitch) * std::cos(yaw), -std::sin(pitch) * std::sin(yaw), std::cos(pitch)};
  }

  bool operator==(const Pose& o) const {
    return position == o.position && yaw == o.yaw && pitch == o.pitch;
  }
};

/// Axis-aligned box in world coordinates (meters). 2D users ignore z.
struct Box {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool contains(const Vec3& p, int dim) const {
    for (int a = 0; a < dim; ++a)
      if (p[a] < min[a] || p[a] > max[a]) return false;
    return true;
  }
  bool within(const Box& outer, int dim) const {
    for (int a = 0; a < dim; ++a)
      if (min[a] < outer.min[a] || max[a] > outer.max[a] || min[a] > max[a]) return false;
    return true;
  }
  // Euclidean distance from p to the box (0 inside).
  double distance(const Vec3& p, int dim) const {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double d = std::max({min[a] - p[a], 0.0, p[a] - max[a]});
      s += d * d;
    }
    return std::sqrt(s);
  }
};

}  // namespace roiex
