#pragma once

#include "roiexplore/grid_map.hpp"
#include "roiexplore/sensor.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace roiex {

/// One cell on a candidate beam, in traversal order from the sensor.
struct BeamCell {
  CellIndex index;
  double occupancy = 0.5;
  bool roi = false;
  double dist = kDistUnknown;
};

using Beam = std::vector<BeamCell>;

enum class ObjectiveKind { Csqmi, RoiCsqmi, Oavi };

inline std::string_view to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::Csqmi: return "csqmi";
    case ObjectiveKind::RoiCsqmi: return "roi-csqmi";
    case ObjectiveKind::Oavi: return "oavi";
  }
  return "?";
}

inline ObjectiveKind parse_objective(std::string_view s) {
  if (s == "csqmi") return ObjectiveKind::Csqmi;
  if (s == "roi-csqmi" || s == "roi_csqmi") return ObjectiveKind::RoiCsqmi;
  if (s == "oavi") return ObjectiveKind::Oavi;
  throw std::invalid_argument("unknown objective '" + std::string(s) + "'");
}

struct OaviParams {
  double alpha_roi = 0.10;
  double alpha_pa = 0.15;
  double d_max = 5.0;  // robot sensor max range
};

// ---------------------------------------------------------------------------
// Beam termination model

/// p(e_j) = o_j * prod_{k<j}(1 - o_k) for each cell, followed by the
/// pass-through outcome prod_k(1 - o_k) as the last entry.
inline std::vector<double> beam_outcome_distribution(std::span<const BeamCell> beam) {
  if (beam.empty()) throw std::invalid_argument("beam_outcome_distribution: empty beam");
  std::vector<double> p(beam.size() + 1);
  double pass = 1.0;
  for (std::size_t j = 0; j < beam.size(); ++j) {
    p[j] = beam[j].occupancy * pass;
    pass *= 1.0 - beam[j].occupancy;
  }
  p.back() = pass;
  return p;
}

/// Probability that nothing before cell j blocks the beam.
inline double visibility(std::span<const BeamCell> beam, std::size_t j) {
  double pv = 1.0;
  for (std::size_t k = 0; k < j && k < beam.size(); ++k) pv *= 1.0 - beam[k].occupancy;
  return pv;
}

namespace detail {
// Cauchy-Schwarz QMI between a Bernoulli(o) cell and the outcome variable,
// given the squared outcome mass before, at, and after the cell.
//
// Outcomes before the cell are independent of it, the outcome at the cell
// implies occupied, every later outcome implies free.
inline double csqmi_from_sums(double o, double sq_before, double p_at, double sq_after) {
  const double q = o * o + (1.0 - o) * (1.0 - o);
  const double joint_sq = q * sq_before + p_at * p_at + sq_after;
  const double marg_sq = q * (sq_before + p_at * p_at + sq_after);
  const double cross = q * sq_before + o * p_at * p_at + (1.0 - o) * sq_after;
  if (joint_sq <= 0.0 || marg_sq <= 0.0 || cross <= 0.0) return 0.0;
  const double v = std::log(joint_sq) + std::log(marg_sq) - 2.0 * std::log(cross);
  return v > 0.0 ? v : 0.0;
}
}  // namespace detail

/// CS-QMI (nats) of cell j with the beam outcome, 0-based j.
inline double csqmi_cell(std::span<const BeamCell> beam, std::size_t j) {
  if (j >= beam.size()) throw std::out_of_range("csqmi_cell: index outside beam");
  const auto p = beam_outcome_distribution(beam);
  double before = 0.0, after = 0.0;
  for (std::size_t i = 0; i < j; ++i) before += p[i] * p[i];
  for (std::size_t i = j + 1; i < p.size(); ++i) after += p[i] * p[i];
  return detail::csqmi_from_sums(beam[j].occupancy, before, p[j], after);
}

/// csqmi_cell for every cell of the beam in one O(n) pass.
inline std::vector<double> csqmi_beam(std::span<const BeamCell> beam) {
  std::vector<double> out(beam.size());
  if (beam.empty()) return out;
  const auto p = beam_outcome_distribution(beam);
  std::vector<double> suffix(p.size() + 1, 0.0);
  for (std::size_t i = p.size(); i-- > 0;) suffix[i] = suffix[i + 1] + p[i] * p[i];
  double before = 0.0;
  for (std::size_t j = 0; j < beam.size(); ++j) {
    out[j] = detail::csqmi_from_sums(beam[j].occupancy, before, p[j], suffix[j + 1]);
    before += p[j] * p[j];
  }
  return out;
}

// ---------------------------------------------------------------------------
// OAVI terms

inline double i_ua(double o, double pv) { return bernoulli_entropy_bits(o) * pv; }

inline double i_roi(bool roi, const OaviParams& params) { return roi ? 1.0 : params.alpha_roi; }

inline double i_pa(double o, double d, const OaviParams& params) {
  if (classify(o) == Occupancy::Unknown && d <= params.d_max) return params.d_max - d;
  return params.alpha_pa;
}

inline double oavi_cell(const BeamCell& c, double pv, const OaviParams& params) {
  return i_ua(c.occupancy, pv) * i_roi(c.roi, params) * i_pa(c.occupancy, c.dist, params);
}

// ---------------------------------------------------------------------------
// View-level utilities

/// Candidate measurement: the ray bundle a camera would cast from a pose.
struct RayBundle {
  Vec3 origin = Vec3::Zero();
  double max_range = 0.0;
  std::vector<Vec3> directions;

  static RayBundle from_camera(const CameraModel& cam, const Pose& pose, int dim) {
    return {pose.position, cam.max_range, ray_directions(cam, pose, dim)};
  }
};

inline Beam cast_beam(const GridMap& map, const Vec3& origin, const Vec3& dir, double max_range) {
  Beam beam;
  traverse_grid(map, origin, dir, max_range, [&](const CellIndex& c, double, double) {
    const auto& cell = map.at(c);
    beam.push_back({c, cell.occupancy(), cell.roi, cell.dist});
    return true;
  });
  return beam;
}

/// Score of one view with its split between ROI and non-ROI cells.
struct ViewScore {
  double total = 0.0;
  double roi_part = 0.0;      // contribution of ROI cells under the objective's per-cell formula
  double non_roi_part = 0.0;  // contribution of the remaining cells
  std::size_t cells = 0;
  std::size_t roi_cells = 0;
};

inline ViewScore score_view(ObjectiveKind kind, const GridMap& map, const RayBundle& bundle,
                            const OaviParams& params = {}) {
  ViewScore s;
  for (const Vec3& d : bundle.directions) {
    const Beam beam = cast_beam(map, bundle.origin, d, bundle.max_range);
    if (beam.empty()) continue;
    s.cells += beam.size();
    if (kind == ObjectiveKind::Oavi) {
      double pv = 1.0;
      for (const auto& c : beam) {
        const double v = oavi_cell(c, pv, params);
        (c.roi ? s.roi_part : s.non_roi_part) += v;
        s.total += v;
        if (c.roi) ++s.roi_cells;
        pv *= 1.0 - c.occupancy;
      }
      continue;
    }
    // The outcome model always uses the full beam; ROI-CSQMI only filters the sum.
    const auto per_cell = csqmi_beam(beam);
    for (std::size_t j = 0; j < beam.size(); ++j) {
      const double v = per_cell[j];
      if (beam[j].roi) {
        ++s.roi_cells;
        s.roi_part += v;
      } else {
        s.non_roi_part += v;
      }
      if (kind == ObjectiveKind::Csqmi || beam[j].roi) s.total += v;
    }
  }
  return s;
}

inline double csqmi_view(const GridMap& map, const RayBundle& bundle) {
  return score_view(ObjectiveKind::Csqmi, map, bundle).total;
}

inline double roi_csqmi_view(const GridMap& map, const RayBundle& bundle) {
  return score_view(ObjectiveKind::RoiCsqmi, map, bundle).total;
}

inline double oavi_view(const GridMap& map, const RayBundle& bundle, const OaviParams& params) {
  return score_view(ObjectiveKind::Oavi, map, bundle, params).total;
}

inline double evaluate_view(ObjectiveKind kind, const GridMap& map, const RayBundle& bundle,
                            const OaviParams& params = {}) {
  return score_view(kind, map, bundle, params).total;
}

}  // namespace roiex
