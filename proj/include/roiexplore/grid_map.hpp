#pragma once

#include "roiexplore/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace roiex {

// Sentinel for "no raytraced obstacle seen yet".
inline constexpr double kDistUnknown = 1.0e9;

// Log-odds increments and clamps for the occupancy update.
inline constexpr double kLogOddsHit = 0.85;
inline constexpr double kLogOddsMiss = -0.4;
inline constexpr double kLogOddsMin = -8.0;
inline constexpr double kLogOddsMax = 8.0;

// Occupancy bands used for planning and for the proximity term.
inline constexpr double kFreeThreshold = 0.4;
inline constexpr double kOccupiedThreshold = 0.6;

inline double occupancy_from_log_odds(double l) { return 1.0 / (1.0 + std::exp(-l)); }

/// Bernoulli entropy in bits, with H(0) = H(1) = 0.
inline double bernoulli_entropy_bits(double o) {
  if (o <= 0.0 || o >= 1.0) return 0.0;
  return -o * std::log2(o) - (1.0 - o) * std::log2(1.0 - o);
}

enum class Occupancy { Free, Unknown, Occupied };

inline Occupancy classify(double o) {
  if (o >= kOccupiedThreshold) return Occupancy::Occupied;
  if (o <= kFreeThreshold) return Occupancy::Free;
  return Occupancy::Unknown;
}

struct CellData {
  double log_odds = 0.0;
  bool roi = false;
  double dist = kDistUnknown;

  double occupancy() const { return occupancy_from_log_odds(log_odds); }
};

/// Per-axis cell coordinates. In 2D maps the z coordinate is always 0.
struct CellIndex {
  std::array<int, 3> v{0, 0, 0};

  CellIndex() = default;
  CellIndex(int x, int y, int z = 0) : v{x, y, z} {}
  int operator[](int a) const { return v[static_cast<std::size_t>(a)]; }
  int& operator[](int a) { return v[static_cast<std::size_t>(a)]; }
  bool operator==(const CellIndex&) const = default;
};

/// Dense occupancy / ROI / obstacle-distance grid in 2D or 3D.
///
/// Cells are half-open boxes [origin + i*res, origin + (i+1)*res) per axis, so a
/// point on a shared face belongs to the higher-index cell. Storage is row-major
/// with x varying fastest.
class GridMap {
 public:
  GridMap(int dim, const Box& bounds, double resolution) : dim_(dim), resolution_(resolution) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("GridMap: dim must be 2 or 3");
    if (!(resolution > 0.0) || !std::isfinite(resolution))
      throw std::invalid_argument("GridMap: resolution must be positive");
    origin_ = bounds.min;
    if (dim == 2) origin_.z() = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double size = bounds.max[a] - bounds.min[a];
      if (!(size > 0.0)) throw std::invalid_argument("GridMap: empty bounds");
      // Tolerate round-off in size/resolution (e.g. 30 / 0.3).
      extents_[static_cast<std::size_t>(a)] = static_cast<int>(std::ceil(size / resolution - 1e-9));
    }
    cells_.resize(static_cast<std::size_t>(extents_[0]) * extents_[1] * extents_[2]);
  }

  static GridMap from_bounds(const Box& bounds, double resolution, int dim) {
    return GridMap(dim, bounds, resolution);
  }

  int dim() const { return dim_; }
  double resolution() const { return resolution_; }
  const Vec3& origin() const { return origin_; }
  const std::array<int, 3>& extents() const { return extents_; }
  std::size_t size() const { return cells_.size(); }

  bool in_bounds(const CellIndex& i) const {
    for (int a = 0; a < 3; ++a)
      if (i[a] < 0 || i[a] >= extents_[static_cast<std::size_t>(a)]) return false;
    return true;
  }

  std::size_t linear(const CellIndex& i) const {
    return static_cast<std::size_t>(i[0]) +
           static_cast<std::size_t>(extents_[0]) *
               (static_cast<std::size_t>(i[1]) + static_cast<std::size_t>(extents_[1]) * static_cast<std::size_t>(i[2]));
  }

  CellIndex unlinear(std::size_t k) const {
    const auto nx = static_cast<std::size_t>(extents_[0]);
    const auto ny = static_cast<std::size_t>(extents_[1]);
    return {static_cast<int>(k % nx), static_cast<int>((k / nx) % ny), static_cast<int>(k / (nx * ny))};
  }

  /// Cell-center position. Throws std::out_of_range outside the grid.
  Vec3 index_to_world(const CellIndex& i) const {
    if (!in_bounds(i)) throw std::out_of_range("GridMap::index_to_world: index outside map");
    return center(i);
  }

  /// Containing cell, or nullopt when p lies outside the grid.
  std::optional<CellIndex> world_to_index(const Vec3& p) const {
    CellIndex i;
    for (int a = 0; a < dim_; ++a) {
      // The small bias keeps points that sit on a face (up to round-off) in the higher cell.
      const double g = std::floor((p[a] - origin_[a]) / resolution_ + 1e-9);
      if (g < 0.0 || g >= extents_[static_cast<std::size_t>(a)]) return std::nullopt;
      i[a] = static_cast<int>(g);
    }
    return i;
  }

  CellData& at(const CellIndex& i) { return cells_[linear(i)]; }
  const CellData& at(const CellIndex& i) const { return cells_[linear(i)]; }

  std::span<CellData> cells() { return cells_; }
  std::span<const CellData> cells() const { return cells_; }

  void add_log_odds(const CellIndex& i, double delta) {
    auto& c = at(i);
    c.log_odds = std::clamp(c.log_odds + delta, kLogOddsMin, kLogOddsMax);
  }

  // Keeps the smaller distance; returns true when the stored value shrank.
  bool lower_distance(const CellIndex& i, double d) {
    auto& c = at(i);
    if (d < c.dist) {
      c.dist = d;
      return true;
    }
    return false;
  }

  /// Sum of Bernoulli cell entropies in bits, optionally restricted to ROI cells.
  double entropy(bool roi_only) const {
    double h = 0.0;
    for (const auto& c : cells_)
      if (!roi_only || c.roi) h += bernoulli_entropy_bits(c.occupancy());
    return h;
  }

  std::size_t roi_count() const {
    return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), [](const CellData& c) { return c.roi; }));
  }

  Vec3 center(const CellIndex& i) const {
    Vec3 p = Vec3::Zero();
    for (int a = 0; a < dim_; ++a) p[a] = origin_[a] + (i[a] + 0.5) * resolution_;
    return p;
  }

 private:
  int dim_;
  double resolution_;
  Vec3 origin_ = Vec3::Zero();
  std::array<int, 3> extents_{1, 1, 1};
  std::vector<CellData> cells_;
};

inline double map_entropy(const GridMap& map, bool roi_only) { return map.entropy(roi_only); }

}  // namespace roiex
