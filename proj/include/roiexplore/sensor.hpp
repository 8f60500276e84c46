#pragma once

#include "roiexplore/core.hpp"
#include "roiexplore/environment.hpp"
#include "roiexplore/grid_map.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace roiex {

/// Pinhole depth camera. Rays are spaced uniformly on the image plane.
struct CameraModel {
  double h_fov = 1.5184;  // ~87 deg
  double v_fov = 1.0123;  // ~58 deg
  int cols = 90;
  int rows = 60;
  double max_range = 5.0;
  int downsample = 1;

  void validate() const {
    const double pi = std::numbers::pi;
    if (!(h_fov > 0.0 && h_fov < pi) || !(v_fov > 0.0 && v_fov < pi))
      throw std::invalid_argument("camera: field of view must lie in (0, pi)");
    if (cols < 2 || rows < 2) throw std::invalid_argument("camera: ray counts must be >= 2");
    if (!(max_range > 0.0)) throw std::invalid_argument("camera: max_range must be positive");
    if (downsample < 1) throw std::invalid_argument("camera: downsample must be >= 1");
  }

  int effective_cols() const { return std::max(1, cols / downsample); }
  int effective_rows() const { return std::max(1, rows / downsample); }
};

namespace detail {
inline double image_coord(int i, int n, double half_tan) {
  return n <= 1 ? 0.0 : half_tan * (-1.0 + 2.0 * i / static_cast<double>(n - 1));
}
}  // namespace detail

/// Unit ray directions of a (downsampled) scan taken from `pose`.
/// 2D: one fan in the horizontal plane. 3D: rows x cols grid.
inline std::vector<Vec3> ray_directions(const CameraModel& cam, const Pose& pose, int dim) {
  const int nc = cam.effective_cols();
  const double th = std::tan(0.5 * cam.h_fov);
  std::vector<Vec3> dirs;
  if (dim == 2) {
    const Vec3 f{std::cos(pose.yaw), std::sin(pose.yaw), 0.0};
    const Vec3 l = pose.left();
    dirs.reserve(static_cast<std::size_t>(nc));
    for (int c = 0; c < nc; ++c) dirs.push_back((f + detail::image_coord(c, nc, th) * l).normalized());
    return dirs;
  }
  const int nr = cam.effective_rows();
  const double tv = std::tan(0.5 * cam.v_fov);
  const Vec3 f = pose.forward(), l = pose.left(), u = pose.up();
  dirs.reserve(static_cast<std::size_t>(nr) * static_cast<std::size_t>(nc));
  for (int r = 0; r < nr; ++r)
    for (int c = 0; c < nc; ++c)
      dirs.push_back((f + detail::image_coord(c, nc, th) * l + detail::image_coord(r, nr, tv) * u).normalized());
  return dirs;
}

struct ScanRay {
  Vec3 direction;
  bool hit = false;
  Vec3 endpoint;
};

struct Scan {
  Pose origin;
  double max_range = 0.0;
  std::vector<ScanRay> rays;
};

/// Casts every camera ray against the ground truth.
/// Throws InvalidState when the pose is inside an obstacle.
inline Scan simulate_scan(const Environment& env, const Pose& pose, const CameraModel& cam) {
  if (env.is_solid(pose.position)) throw InvalidState("simulate_scan: sensor pose inside an obstacle");
  Scan s;
  s.origin = pose;
  s.max_range = cam.max_range;
  for (const Vec3& d : ray_directions(cam, pose, env.dim)) {
    ScanRay r;
    r.direction = d;
    if (auto t = env.intersect(pose.position, d, cam.max_range)) {
      r.hit = true;
      r.endpoint = pose.position + *t * d;
    } else {
      r.endpoint = pose.position + cam.max_range * d;
    }
    s.rays.push_back(r);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Field-of-view volume

/// Triangle (2D, 3 vertices) or tetrahedron (3D, 4 vertices).
struct Simplex {
  std::array<Vec3, 4> v;
  int vertices = 3;

  bool contains(const Vec3& p, double eps = 1e-9) const {
    if (vertices == 3) {
      auto cross = [](const Vec3& a, const Vec3& b, const Vec3& c) {
        return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
      };
      const double area = cross(v[0], v[1], v[2]);
      const double s = area > 0 ? 1.0 : -1.0;
      const double tol = eps * std::abs(area);
      return s * cross(v[0], v[1], p) >= -tol && s * cross(v[1], v[2], p) >= -tol &&
             s * cross(v[2], v[0], p) >= -tol;
    }
    Eigen::Matrix3d m;
    m.col(0) = v[1] - v[0];
    m.col(1) = v[2] - v[0];
    m.col(2) = v[3] - v[0];
    const Vec3 w = m.partialPivLu().solve(p - v[0]);
    return w.x() >= -eps && w.y() >= -eps && w.z() >= -eps && w.sum() <= 1.0 + eps;
  }

  double measure() const {
    if (vertices == 3) {
      return 0.5 * std::abs((v[1].x() - v[0].x()) * (v[2].y() - v[0].y()) -
                            (v[1].y() - v[0].y()) * (v[2].x() - v[0].x()));
    }
    return std::abs((v[1] - v[0]).dot((v[2] - v[0]).cross(v[3] - v[0]))) / 6.0;
  }
};

/// Truncated FoV pyramid split into two simplices. The far face is the plane
/// at depth `range` along the optical axis.
struct Frustum {
  Pose apex;
  int dim = 2;
  double range = 0.0;
  std::vector<Simplex> simplices;

  bool contains(const Vec3& p) const {
    return std::any_of(simplices.begin(), simplices.end(), [&](const Simplex& s) { return s.contains(p); });
  }

  Box bounding_box() const {
    Box b{Vec3::Constant(std::numeric_limits<double>::infinity()),
          Vec3::Constant(-std::numeric_limits<double>::infinity())};
    for (const auto& s : simplices)
      for (int k = 0; k < s.vertices; ++k) {
        b.min = b.min.cwiseMin(s.v[static_cast<std::size_t>(k)]);
        b.max = b.max.cwiseMax(s.v[static_cast<std::size_t>(k)]);
      }
    return b;
  }

  double measure() const {
    double m = 0.0;
    for (const auto& s : simplices) m += s.measure();
    return m;
  }
};

/// FoV pyramid of `cam` with half-angles scaled by `roi_scale`, truncated at
/// `range` (defaults to the camera max range).
inline Frustum build_frustum(const Pose& pose, const CameraModel& cam, double roi_scale, int dim,
                             double range = -1.0) {
  cam.validate();
  if (!(roi_scale > 0.0 && roi_scale <= 1.0)) throw std::invalid_argument("build_frustum: roi_scale must be in (0, 1]");
  Frustum fr;
  fr.apex = pose;
  fr.dim = dim;
  fr.range = range > 0.0 ? range : cam.max_range;
  const double th = std::tan(0.5 * cam.h_fov * roi_scale);
  const Vec3& o = pose.position;
  if (dim == 2) {
    const Vec3 f{std::cos(pose.yaw), std::sin(pose.yaw), 0.0};
    const Vec3 l = pose.left();
    const Vec3 c = o + fr.range * f;
    const Vec3 left = c + fr.range * th * l;
    const Vec3 right = c - fr.range * th * l;
    fr.simplices.push_back(Simplex{{o, left, c, Vec3::Zero()}, 3});
    fr.simplices.push_back(Simplex{{o, c, right, Vec3::Zero()}, 3});
    return fr;
  }
  const double tv = std::tan(0.5 * cam.v_fov * roi_scale);
  const Vec3 f = pose.forward(), l = pose.left(), u = pose.up();
  auto corner = [&](double sl, double su) { return o + fr.range * (f + sl * th * l + su * tv * u); };
  const Vec3 c0 = corner(1, 1), c1 = corner(-1, 1), c2 = corner(-1, -1), c3 = corner(1, -1);
  fr.simplices.push_back(Simplex{{o, c0, c1, c2}, 4});
  fr.simplices.push_back(Simplex{{o, c0, c2, c3}, 4});
  return fr;
}

// ---------------------------------------------------------------------------
// Grid traversal

/// Amanatides-Woo traversal of the cells pierced by the segment
/// origin + t * dir, t in [0, length]. `visit(cell, t_entry, t_exit)` returns
/// false to stop early. Corner crossings step the lowest axis first, so
/// consecutive cells are always face neighbours. Stops at the map boundary.
template <class Visit>
void traverse_grid(const GridMap& map, const Vec3& origin, const Vec3& dir, double length, Visit&& visit) {
  auto start = map.world_to_index(origin);
  if (!start) return;
  CellIndex c = *start;
  const int dim = map.dim();
  const double res = map.resolution();
  const double inf = std::numeric_limits<double>::infinity();
  std::array<int, 3> step{0, 0, 0};
  std::array<double, 3> t_max{inf, inf, inf};
  std::array<double, 3> t_delta{inf, inf, inf};
  for (int a = 0; a < dim; ++a) {
    const auto k = static_cast<std::size_t>(a);
    if (dir[a] > 0.0) {
      step[k] = 1;
      t_max[k] = (map.origin()[a] + (c[a] + 1) * res - origin[a]) / dir[a];
    } else if (dir[a] < 0.0) {
      step[k] = -1;
      t_max[k] = (map.origin()[a] + c[a] * res - origin[a]) / dir[a];
    } else {
      continue;
    }
    t_max[k] = std::max(t_max[k], 0.0);
    t_delta[k] = res / std::abs(dir[a]);
  }
  const auto& ext = map.extents();
  double t_entry = 0.0;
  while (true) {
    std::size_t axis = 0;
    for (std::size_t a = 1; a < static_cast<std::size_t>(dim); ++a)
      if (t_max[a] < t_max[axis]) axis = a;
    const double t_exit = t_max[axis];
    if (!visit(static_cast<const CellIndex&>(c), t_entry, t_exit)) return;
    if (t_exit >= length) return;
    c.v[axis] += step[axis];
    if (c.v[axis] < 0 || c.v[axis] >= ext[axis]) return;
    t_entry = t_exit;
    t_max[axis] += t_delta[axis];
  }
}

enum class RayCellKind : std::uint8_t { BeforeHit, Hit, BehindHit };

struct RayCell {
  CellIndex index;
  RayCellKind kind = RayCellKind::BeforeHit;
};

/// Cells traversed from `origin` towards `endpoint` and on to `extend_to`
/// meters of total length. When `hit` is set, the cell just past the
/// endpoint surface is flagged Hit and everything beyond it BehindHit.
inline std::vector<RayCell> raycast_cells(const GridMap& map, const Vec3& origin, const Vec3& endpoint, bool hit,
                                          double extend_to = 0.0) {
  std::vector<RayCell> out;
  const Vec3 delta = endpoint - origin;
  const double len = delta.norm();
  if (len <= 0.0) {
    if (auto i = map.world_to_index(origin)) out.push_back({*i, hit ? RayCellKind::Hit : RayCellKind::BeforeHit});
    return out;
  }
  const Vec3 dir = delta / len;
  // The surface lies on the endpoint; the struck cell is the one just past it.
  const double hit_t = len + 1e-6 * map.resolution();
  const double total = std::max(hit ? hit_t : len, extend_to);
  traverse_grid(map, origin, dir, total, [&](const CellIndex& c, double t_in, double t_out) {
    RayCellKind kind = RayCellKind::BeforeHit;
    if (hit) {
      if (t_in > hit_t)
        kind = RayCellKind::BehindHit;
      else if (t_out > hit_t)
        kind = RayCellKind::Hit;
    } else if (t_in >= len) {
      kind = RayCellKind::BehindHit;
    }
    out.push_back({c, kind});
    return true;
  });
  return out;
}

}  // namespace roiex
