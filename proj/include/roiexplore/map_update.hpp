#pragma once

#include "roiexplore/grid_map.hpp"
#include "roiexplore/sensor.hpp"

#include <cmath>
#include <stdexcept>

namespace roiex {

namespace detail {
inline void require_origin_inside(const GridMap& map, const Scan& scan, const char* who) {
  if (!map.world_to_index(scan.origin.position))
    throw std::invalid_argument(std::string(who) + ": scan origin outside map");
}
}  // namespace detail

/// Standard log-odds fusion: cells before the hit get a miss, the hit cell a hit.
/// No-hit rays mark everything out to max range as missed.
inline void update_occupancy(GridMap& map, const Scan& scan) {
  detail::require_origin_inside(map, scan, "update_occupancy");
  for (const auto& ray : scan.rays) {
    for (const auto& rc : raycast_cells(map, scan.origin.position, ray.endpoint, ray.hit)) {
      switch (rc.kind) {
        case RayCellKind::BeforeHit: map.add_log_odds(rc.index, kLogOddsMiss); break;
        case RayCellKind::Hit: map.add_log_odds(rc.index, kLogOddsHit); break;
        case RayCellKind::BehindHit: break;
      }
    }
  }
}

/// Obstacle-distance update: each hit ray is extended to the scan's max range
/// and every cell on it keeps the minimum of its stored distance and the
/// distance between cell centers of itself and the hit cell.
inline void update_distance(GridMap& map, const Scan& scan) {
  detail::require_origin_inside(map, scan, "update_distance");
  for (const auto& ray : scan.rays) {
    if (!ray.hit) continue;
    const auto cells = raycast_cells(map, scan.origin.position, ray.endpoint, true, scan.max_range);
    const RayCell* hit = nullptr;
    for (const auto& rc : cells)
      if (rc.kind == RayCellKind::Hit) hit = &rc;
    if (!hit) continue;  // surface lies outside the grid
    const Vec3 hit_center = map.center(hit->index);
    for (const auto& rc : cells) map.lower_distance(rc.index, (map.center(rc.index) - hit_center).norm());
  }
}

/// Flags every cell whose center lies in the frustum, occluded or not.
/// Returns the number of cells that were not flagged before.
inline std::size_t mark_roi(GridMap& map, const Frustum& frustum) {
  const Box bb = frustum.bounding_box();
  CellIndex lo, hi;
  const auto& ext = map.extents();
  for (int a = 0; a < 3; ++a) {
    if (a >= map.dim()) {
      lo[a] = 0;
      hi[a] = 0;
      continue;
    }
    const double r = map.resolution();
    lo[a] = std::max(0, static_cast<int>(std::floor((bb.min[a] - map.origin()[a]) / r)));
    hi[a] = std::min(ext[static_cast<std::size_t>(a)] - 1, static_cast<int>(std::floor((bb.max[a] - map.origin()[a]) / r)));
  }
  std::size_t marked = 0;
  for (int z = lo[2]; z <= hi[2]; ++z)
    for (int y = lo[1]; y <= hi[1]; ++y)
      for (int x = lo[0]; x <= hi[0]; ++x) {
        const CellIndex i{x, y, z};
        auto& cell = map.at(i);
        if (cell.roi) continue;
        if (frustum.contains(map.center(i))) {
          cell.roi = true;
          ++marked;
        }
      }
  return marked;
}

}  // namespace roiex
