#pragma once

#include "roiexplore/grid_map.hpp"
#include "roiexplore/io.hpp"
#include "roiexplore/objectives.hpp"
#include "roiexplore/sensor.hpp"

#include <numbers>
#include <optional>
#include <stdexcept>

namespace roiex {

struct Heatmap {
  ScalarGrid value;
  // Per-cell OAVI factors, only filled for the OAVI objective.
  std::optional<ScalarGrid> i_ua, i_roi, i_pa;
};

/// Best view score from each free or unknown cell center over `headings`
/// evenly spaced yaws; occupied cells get 0. 2D maps only.
inline Heatmap compute_heatmap(const GridMap& map, ObjectiveKind kind, const CameraModel& cam,
                               const OaviParams& params = {}, int headings = 8) {
  if (map.dim() != 2) throw std::invalid_argument("compute_heatmap: only 2D maps are supported");
  if (headings < 1) throw std::invalid_argument("compute_heatmap: need at least one heading");
  const auto& ext = map.extents();
  Heatmap h;
  h.value = ScalarGrid(ext[0], ext[1]);
  for (int y = 0; y < ext[1]; ++y)
    for (int x = 0; x < ext[0]; ++x) {
      const CellIndex i{x, y};
      if (classify(map.at(i).occupancy()) == Occupancy::Occupied) continue;
      double best = 0.0;
      for (int k = 0; k < headings; ++k) {
        const Pose pose(map.center(i), 2.0 * std::numbers::pi * k / headings);
        best = std::max(best, score_view(kind, map, RayBundle::from_camera(cam, pose, 2), params).total);
      }
      h.value.at(x, y) = best;
    }
  if (kind == ObjectiveKind::Oavi) {
    h.i_ua = ScalarGrid(ext[0], ext[1]);
    h.i_roi = ScalarGrid(ext[0], ext[1]);
    h.i_pa = ScalarGrid(ext[0], ext[1]);
    for (int y = 0; y < ext[1]; ++y)
      for (int x = 0; x < ext[0]; ++x) {
        const auto& c = map.at({x, y});
        const double o = c.occupancy();
        h.i_ua->at(x, y) = i_ua(o, 1.0);
        h.i_roi->at(x, y) = i_roi(c.roi, params);
        h.i_pa->at(x, y) = i_pa(o, c.dist, params);
      }
  }
  return h;
}

}  // namespace roiex
