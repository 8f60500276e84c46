#pragma once

#include "roiexplore/core.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace roiex {

/// Ground-truth world: axis-aligned box obstacles inside a walled bounding box.
///
/// The bounding walls are one grid cell thick and sit on the inside of
/// `bounds`, so with grid-aligned obstacles every surface coincides with a
/// cell face and no free cell is ever both hit and passed through.
struct Environment {
  std::string name;
  int dim = 2;
  Box bounds;
  double resolution = 0.3;
  std::vector<Box> obstacles;
  Pose human;
  std::optional<Pose> robot;

  Box interior() const {
    Box b = bounds;
    for (int a = 0; a < dim; ++a) {
      b.min[a] += resolution;
      b.max[a] -= resolution;
    }
    return b;
  }

  bool is_solid(const Vec3& p) const {
    const Box in = interior();
    for (int a = 0; a < dim; ++a)
      if (p[a] <= in.min[a] || p[a] >= in.max[a]) return true;
    return std::any_of(obstacles.begin(), obstacles.end(), [&](const Box& b) { return b.contains(p, dim); });
  }

  /// Distance from p to the nearest solid surface; 0 when p is inside a solid.
  double clearance(const Vec3& p) const {
    if (is_solid(p)) return 0.0;
    const Box in = interior();
    double c = std::numeric_limits<double>::infinity();
    for (int a = 0; a < dim; ++a) c = std::min({c, p[a] - in.min[a], in.max[a] - p[a]});
    for (const auto& b : obstacles) c = std::min(c, b.distance(p, dim));
    return c;
  }

  /// Analytic first intersection along a unit direction within max_range.
  std::optional<double> intersect(const Vec3& origin, const Vec3& dir, double max_range) const {
    double best = std::numeric_limits<double>::infinity();
    const Box in = interior();
    for (int a = 0; a < dim; ++a) {
      if (dir[a] > 0.0) best = std::min(best, (in.max[a] - origin[a]) / dir[a]);
      if (dir[a] < 0.0) best = std::min(best, (in.min[a] - origin[a]) / dir[a]);
    }
    for (const auto& b : obstacles) {
      double t0 = 0.0;
      double t1 = std::numeric_limits<double>::infinity();
      bool miss = false;
      for (int a = 0; a < dim && !miss; ++a) {
        if (dir[a] == 0.0) {
          miss = origin[a] < b.min[a] || origin[a] > b.max[a];
          continue;
        }
        double ta = (b.min[a] - origin[a]) / dir[a];
        double tb = (b.max[a] - origin[a]) / dir[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        miss = t0 > t1;
      }
      if (!miss) best = std::min(best, t0);
    }
    if (best <= max_range) return std::max(best, 0.0);
    return std::nullopt;
  }

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const {
    if (dim != 2 && dim != 3) throw std::invalid_argument("environment: dim must be 2 or 3");
    if (!(resolution > 0.0)) throw std::invalid_argument("environment: resolution must be positive");
    for (int a = 0; a < dim; ++a)
      if (!(bounds.max[a] - bounds.min[a] > 2.0 * resolution))
        throw std::invalid_argument("environment: bounds too small on axis " + std::to_string(a));
    for (std::size_t k = 0; k < obstacles.size(); ++k)
      if (!obstacles[k].within(bounds, dim))
        throw std::invalid_argument("environment: obstacle " + std::to_string(k) + " outside bounds");
    if (is_solid(human.position)) throw std::invalid_argument("environment: human pose is not in free space");
    if (robot && is_solid(robot->position)) throw std::invalid_argument("environment: robot pose is not in free space");
  }
};

}  // namespace roiex
