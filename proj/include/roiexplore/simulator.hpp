#pragma once

#include "roiexplore/environment.hpp"
#include "roiexplore/grid_map.hpp"
#include "roiexplore/map_update.hpp"
#include "roiexplore/objectives.hpp"
#include "roiexplore/planner.hpp"
#include "roiexplore/sensor.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace roiex {

// ---------------------------------------------------------------------------
// Built-in scenes

inline constexpr double kHumanEyeHeight = 1.65;

/// "single_wall", "two_walls" or "multi_obstacle" in a 30 x 30 (x 10) m box.
/// All geometry sits on the 0.3 m grid. Throws std::invalid_argument for
/// other names.
inline Environment builtin_scene(const std::string& name, int dim = 2) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("builtin_scene: dim must be 2 or 3");
  Environment env;
  env.name = name;
  env.dim = dim;
  env.resolution = 0.3;
  env.bounds = {Vec3(0, 0, 0), Vec3(30, 30, dim == 3 ? 10 : 0)};
  env.human = Pose(Vec3(2.55, 15.15, dim == 3 ? kHumanEyeHeight : 0.0), 0.0);
  const double z1 = dim == 3 ? 10.0 : 0.0;
  auto box = [&](double x0, double y0, double x1, double y1) { return Box{Vec3(x0, y0, 0), Vec3(x1, y1, z1)}; };
  if (name == "single_wall") {
    env.obstacles = {box(10.5, 12.0, 11.1, 18.0)};
  } else if (name == "two_walls") {
    env.obstacles = {box(10.5, 14.1, 11.1, 16.2), box(10.5, 12.3, 11.1, 13.2)};
  } else if (name == "multi_obstacle") {
    for (auto [x, y] : {std::pair{6.0, 13.5}, {9.0, 16.8}, {12.0, 12.0}, {12.0, 18.0}, {15.0, 15.0}})
      env.obstacles.push_back(box(x, y, x + 1.5, y + 1.5));
  } else {
    throw std::invalid_argument("unknown built-in scene '" + name + "'");
  }
  return env;
}

inline bool is_builtin_scene(const std::string& name) {
  return name == "single_wall" || name == "two_walls" || name == "multi_obstacle";
}

// ---------------------------------------------------------------------------
// Robot start

namespace detail {
// Portable uniform double in [0, 1) from a 64-bit engine.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
}  // namespace detail

/// Uniform position in the 4 x 4 m box centered on the human (at human
/// height), rejection-sampled until it has `clearance` from every solid. The
/// robot faces the same way as the human. Throws InfeasibleEnvironment after
/// 1000 straight rejections.
inline Pose sample_robot_start(const Environment& env, std::uint64_t seed, double clearance = 0.3) {
  std::mt19937_64 rng(seed);
  const Vec3 c = env.human.position;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vec3 p = c;
    p.x() = c.x() - 2.0 + 4.0 * detail::unit_uniform(rng);
    p.y() = c.y() - 2.0 + 4.0 * detail::unit_uniform(rng);
    if (!env.bounds.contains(p, env.dim)) continue;
    if (env.clearance(p) < clearance) continue;
    return Pose(p, env.human.yaw, env.human.pitch);
  }
  throw InfeasibleEnvironment("sample_robot_start: no free start pose near the human");
}

// ---------------------------------------------------------------------------
// Trials

struct TrialConfig {
  Environment env;
  ObjectiveKind objective = ObjectiveKind::Oavi;
  OaviParams oavi;
  CameraModel human_camera{1.5184, 1.0123, 180, 120, 10.0, 4};
  CameraModel robot_camera{1.5184, 1.0123, 90, 60, 5.0, 2};
  double roi_scale = 0.40;
  double mapping_period = 0.1;
  double planning_period = 1.0;
  double duration = 120.0;
  std::uint64_t seed = 0;
  SafetyParams safety;
  LibrarySpec library;

  /// Simulation parameter set, with 3D enabling vertical-speed tiers.
  static TrialConfig defaults(Environment env, ObjectiveKind kind = ObjectiveKind::Oavi) {
    TrialConfig c;
    c.library.vz_levels = env.dim == 3 ? std::vector<double>{-0.2, 0.0, 0.2} : std::vector<double>{0.0};
    c.env = std::move(env);
    c.objective = kind;
    c.oavi.d_max = c.robot_camera.max_range;
    return c;
  }

  void validate() const {
    env.validate();
    human_camera.validate();
    robot_camera.validate();
    if (!(mapping_period > 0.0) || planning_period < mapping_period)
      throw std::invalid_argument("trial: mapping period must be positive and not exceed the planning period");
    if (!(duration >= 0.0)) throw std::invalid_argument("trial: duration must be non-negative");
    if (!(safety.radius > 0.0)) throw std::invalid_argument("trial: robot radius must be positive");
  }
};

struct Sample {
  double t = 0.0;
  double roi_entropy = 0.0;  // bits
  double map_entropy = 0.0;  // bits
  Pose pose;
};

struct PlanRecord {
  double t = 0.0;
  int primitive = -1;  // -1: nothing safe, in-place recovery turn
  double score = 0.0;
  double roi_score = 0.0;
  double non_roi_score = 0.0;
  std::size_t roi_cells_in_view = 0;
  double latency_s = 0.0;
};

struct TrialResult {
  std::uint64_t seed = 0;
  std::vector<Sample> series;
  std::vector<PlanRecord> plans;
  std::size_t roi_cell_count = 0;
  double roi_entropy_floor = 0.0;  // ROI entropy if every ROI cell reached its clamp
  std::vector<std::size_t> roi_count_per_step;
  std::shared_ptr<const GridMap> final_map;
};

/// Lowest ROI entropy reachable by the clamped update: each ROI cell at the
/// clamp matching its ground-truth state.
inline double roi_entropy_floor(const GridMap& map, const Environment& env) {
  const double h_free = bernoulli_entropy_bits(occupancy_from_log_odds(kLogOddsMin));
  const double h_occ = bernoulli_entropy_bits(occupancy_from_log_odds(kLogOddsMax));
  double h = 0.0;
  for (std::size_t k = 0; k < map.size(); ++k) {
    if (!map.cells()[k].roi) continue;
    h += env.is_solid(map.center(map.unlinear(k))) ? h_occ : h_free;
  }
  return h;
}

/// Applies the one-shot human observation: occupancy, distance and ROI.
inline void apply_human_observation(GridMap& map, const TrialConfig& cfg) {
  const Scan human = simulate_scan(cfg.env, cfg.env.human, cfg.human_camera);
  update_occupancy(map, human);
  update_distance(map, human);
  const Frustum roi = build_frustum(cfg.env.human, cfg.human_camera, cfg.roi_scale, cfg.env.dim,
                                    cfg.human_camera.max_range);
  mark_roi(map, roi);
}

namespace detail {
inline bool any_motion_safe(const GridMap& map, const Pose& pose, const PrimitiveLibrary& lib, const PlannerConfig& cfg) {
  for (std::size_t i = 0; i < lib.size(); ++i)
    if (!lib[i].is_hover() && is_safe(map, propagate(pose, lib[i], cfg.dt), cfg.safety)) return true;
  return false;
}
}  // namespace detail

inline TrialResult run_trial(const TrialConfig& cfg) {
  cfg.validate();
  const Environment& env = cfg.env;
  auto map = std::make_shared<GridMap>(env.dim, env.bounds, env.resolution);
  apply_human_observation(*map, cfg);

  TrialResult result;
  result.seed = cfg.seed;
  result.roi_cell_count = map->roi_count();
  result.roi_entropy_floor = roi_entropy_floor(*map, env);

  Pose pose = env.robot ? *env.robot : sample_robot_start(env, cfg.seed, cfg.safety.radius);
  auto record = [&](double t) {
    result.series.push_back({t, map->entropy(true), map->entropy(false), pose});
    result.roi_count_per_step.push_back(map->roi_count());
  };
  record(0.0);

  const PrimitiveLibrary lib = generate_library(cfg.library);
  PlannerConfig planner{cfg.objective, cfg.oavi, cfg.robot_camera, cfg.safety, cfg.mapping_period};
  const MotionPrimitive recovery{0.0, cfg.library.yaw_rate_max, 0.0, cfg.library.duration};

  const auto steps = static_cast<long>(std::llround(cfg.duration / cfg.mapping_period));
  const long plan_every = std::max(1L, static_cast<long>(std::llround(cfg.planning_period / cfg.mapping_period)));
  MotionPrimitive active = lib[0];
  Pose active_start = pose;
  long active_step = 0;

  for (long k = 1; k <= steps; ++k) {
    if ((k - 1) % plan_every == 0) {
      const auto t0 = std::chrono::steady_clock::now();
      auto sel = select_best(*map, pose, lib, planner);
      const auto t1 = std::chrono::steady_clock::now();
      // Hovering in front of a wall never changes the view, so a robot whose
      // only safe action is hover is treated as boxed in.
      if (sel && lib[sel->index].is_hover() && !detail::any_motion_safe(*map, pose, lib, planner)) sel.reset();
      PlanRecord rec;
      rec.t = static_cast<double>(k - 1) * cfg.mapping_period;
      rec.latency_s = std::chrono::duration<double>(t1 - t0).count();
      if (sel) {
        active = lib[sel->index];
        rec.primitive = static_cast<int>(sel->index);
        rec.score = sel->score;
        rec.roi_score = sel->detail.roi_part;
        rec.non_roi_score = sel->detail.non_roi_part;
        rec.roi_cells_in_view = sel->detail.roi_cells;
      } else {
        active = recovery;
      }
      result.plans.push_back(rec);
      active_start = pose;
      active_step = 0;
    }
    ++active_step;
    const Pose next = pose_at(active_start, active, static_cast<double>(active_step) * cfg.mapping_period);
    // Ground-truth guard: a step into an obstacle's margin is refused and the
    // rest of the cycle becomes an in-place turn, which brings the obstacle into view.
    const double c_next = env.clearance(next.position);
    if (c_next >= cfg.safety.radius || c_next >= env.clearance(pose.position)) {
      pose = next;
    } else {
      active = recovery;
      if (active_step > 0 && next.yaw != pose.yaw && wrap_angle(next.yaw - pose.yaw) < 0.0) active.yaw_rate = -active.yaw_rate;
      active_start = pose;
      active_step = 1;
      pose = pose_at(active_start, active, cfg.mapping_period);
    }

    const Scan scan = simulate_scan(env, pose, cfg.robot_camera);
    update_occupancy(*map, scan);
    update_distance(*map, scan);
    record(static_cast<double>(k) * cfg.mapping_period);
  }
  result.final_map = std::move(map);
  return result;
}

/// First time the ROI entropy has dropped by `fraction` of its reducible
/// amount (initial minus floor), or nullopt if never.
inline std::optional<double> time_to_reduction(const TrialResult& r, double fraction) {
  if (r.series.empty()) return std::nullopt;
  const double h0 = r.series.front().roi_entropy;
  const double reducible = h0 - r.roi_entropy_floor;
  if (!(reducible > 0.0)) return std::nullopt;
  for (const auto& s : r.series)
    if (h0 - s.roi_entropy >= fraction * reducible) return s.t;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Batches

struct TrialOutcome {
  std::uint64_t seed = 0;
  std::optional<TrialResult> result;
  std::string error;

  bool ok() const { return result.has_value(); }
};

/// Runs each config independently on `jobs` worker threads; errors are kept
/// per trial. Output order matches input order.
inline std::vector<TrialOutcome> run_batch(const std::vector<TrialConfig>& configs, unsigned jobs = 1) {
  std::vector<TrialOutcome> out(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      out[i].seed = configs[i].seed;
      try {
        out[i].result = run_trial(configs[i]);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
  if (jobs == 1) {
    worker();
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

inline std::vector<TrialOutcome> run_batch(const TrialConfig& base, int n_trials, std::uint64_t base_seed,
                                           unsigned jobs = 1) {
  if (n_trials < 1) throw std::invalid_argument("run_batch: need at least one trial");
  std::vector<TrialConfig> configs(static_cast<std::size_t>(n_trials), base);
  for (int i = 0; i < n_trials; ++i) configs[static_cast<std::size_t>(i)].seed = base_seed + static_cast<std::uint64_t>(i);
  return run_batch(configs, jobs);
}

}  // namespace roiex
