#pragma once

#include "roiexplore/grid_map.hpp"
#include "roiexplore/objectives.hpp"
#include "roiexplore/sensor.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace roiex {

/// Constant-velocity, constant-yaw-rate action.
struct MotionPrimitive {
  double v = 0.0;         // forward speed, m/s
  double yaw_rate = 0.0;  // rad/s
  double vz = 0.0;        // vertical speed, m/s (3D)
  double duration = 1.0;  // s

  bool is_hover() const { return v == 0.0 && yaw_rate == 0.0 && vz == 0.0; }
};

struct LibrarySpec {
  double v_max = 0.75;
  double yaw_rate_max = 0.25;
  std::vector<double> vz_levels{0.0};
  double duration = 1.0;
  int count = 21;
};

/// Index 0 is always hover.
struct PrimitiveLibrary {
  std::vector<MotionPrimitive> primitives;

  std::size_t size() const { return primitives.size(); }
  const MotionPrimitive& operator[](std::size_t i) const { return primitives[i]; }
};

/// Builds `count` primitives: per vertical-speed tier an odd, symmetric,
/// uniformly spaced set of yaw rates over [-yaw_rate_max, yaw_rate_max] at
/// full forward speed. The zero-yaw slot of the level tier is the hover action.
inline PrimitiveLibrary generate_library(const LibrarySpec& spec) {
  if (!(spec.duration > 0.0)) throw std::invalid_argument("generate_library: duration must be positive");
  if (spec.vz_levels.empty() || spec.count <= 0) throw std::invalid_argument("generate_library: empty library");
  const int tiers = static_cast<int>(spec.vz_levels.size());
  if (spec.count % tiers != 0) throw std::invalid_argument("generate_library: count not divisible by vertical tiers");
  const int per_tier = spec.count / tiers;
  if (per_tier % 2 == 0) throw std::invalid_argument("generate_library: primitives per tier must be odd");
  bool has_level = false;
  for (double vz : spec.vz_levels) has_level = has_level || vz == 0.0;
  if (!has_level) throw std::invalid_argument("generate_library: vz levels must include 0");

  PrimitiveLibrary lib;
  lib.primitives.push_back({0.0, 0.0, 0.0, spec.duration});
  const int half = per_tier / 2;
  for (double vz : spec.vz_levels) {
    for (int k = -half; k <= half; ++k) {
      if (k == 0 && vz == 0.0) continue;  // hover slot
      const double w = half == 0 ? 0.0 : spec.yaw_rate_max * k / half;
      lib.primitives.push_back({spec.v_max, w, vz, spec.duration});
    }
  }
  return lib;
}

/// Pose after `t` seconds on the arc.
inline Pose pose_at(const Pose& start, const MotionPrimitive& prim, double t) {
  const double yaw = start.yaw + prim.yaw_rate * t;
  Vec3 p = start.position;
  if (std::abs(prim.yaw_rate) > 1e-12) {
    const double r = prim.v / prim.yaw_rate;
    p.x() += r * (std::sin(yaw) - std::sin(start.yaw));
    p.y() -= r * (std::cos(yaw) - std::cos(start.yaw));
  } else {
    p.x() += prim.v * t * std::cos(start.yaw);
    p.y() += prim.v * t * std::sin(start.yaw);
  }
  p.z() += prim.vz * t;
  return Pose(p, yaw, start.pitch);
}

/// Sampled poses at t = 0, dt, 2dt, ..., duration (the last sample is always
/// the end pose).
inline std::vector<Pose> propagate(const Pose& start, const MotionPrimitive& prim, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("propagate: dt must be positive");
  const int n = static_cast<int>(std::ceil(prim.duration / dt - 1e-9));
  std::vector<Pose> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k < n; ++k) out.push_back(pose_at(start, prim, k * dt));
  out.push_back(pose_at(start, prim, prim.duration));
  return out;
}

struct SafetyParams {
  double radius = 0.3;
  bool unknown_is_obstacle = false;
};

/// Every sampled pose must keep the cells overlapping the robot disc (ball in
/// 3D) non-occupied, and known-free when unknown counts as obstacle. Cells
/// beyond the map edge count as blocked.
inline bool is_safe(const GridMap& map, const std::vector<Pose>& poses, const SafetyParams& safety) {
  const double res = map.resolution();
  const int reach = static_cast<int>(std::ceil(safety.radius / res)) + 1;
  const double r2 = safety.radius * safety.radius;
  const int dim = map.dim();
  for (const auto& pose : poses) {
    auto ci = map.world_to_index(pose.position);
    if (!ci) return false;
    const int zr = dim == 3 ? reach : 0;
    for (int dz = -zr; dz <= zr; ++dz)
      for (int dy = -reach; dy <= reach; ++dy)
        for (int dx = -reach; dx <= reach; ++dx) {
          const CellIndex n{(*ci)[0] + dx, (*ci)[1] + dy, (*ci)[2] + dz};
          double d2 = 0.0;
          for (int a = 0; a < dim; ++a) {
            const double lo = map.origin()[a] + n[a] * res;
            const double g = std::max({lo - pose.position[a], 0.0, pose.position[a] - (lo + res)});
            d2 += g * g;
          }
          if (d2 >= r2) continue;
          if (!map.in_bounds(n)) return false;
          const auto state = classify(map.at(n).occupancy());
          if (state == Occupancy::Occupied) return false;
          if (state == Occupancy::Unknown && safety.unknown_is_obstacle) return false;
        }
  }
  return true;
}

struct PlannerConfig {
  ObjectiveKind objective = ObjectiveKind::Oavi;
  OaviParams oavi;
  CameraModel camera;  // robot camera used to cast candidate views
  SafetyParams safety;
  double dt = 0.1;
};

struct Selection {
  std::size_t index = 0;
  double score = 0.0;
  ViewScore detail;
};

/// Objective value at the end pose of every primitive; nullopt for unsafe ones.
inline std::vector<std::optional<ViewScore>> score_primitives(const GridMap& map, const Pose& pose,
                                                              const PrimitiveLibrary& lib, const PlannerConfig& cfg) {
  std::vector<std::optional<ViewScore>> out(lib.size());
  for (std::size_t i = 0; i < lib.size(); ++i) {
    const auto poses = propagate(pose, lib[i], cfg.dt);
    if (!is_safe(map, poses, cfg.safety)) continue;
    const auto bundle = RayBundle::from_camera(cfg.camera, poses.back(), map.dim());
    out[i] = score_view(cfg.objective, map, bundle, cfg.oavi);
  }
  return out;
}

/// Argmax over safe primitives, ties to the lowest index; nullopt when boxed in.
inline std::optional<Selection> select_best(const GridMap& map, const Pose& pose, const PrimitiveLibrary& lib,
                                            const PlannerConfig& cfg) {
  const auto scores = score_primitives(map, pose, lib, cfg);
  std::optional<Selection> best;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i]) continue;
    if (!best || scores[i]->total > best->score) best = Selection{i, scores[i]->total, *scores[i]};
  }
  return best;
}

}  // namespace roiex
