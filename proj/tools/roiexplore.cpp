#include "roiexplore/heatmap.hpp"
#include "roiexplore/io.hpp"
#include "roiexplore/simulator.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace roiex;

namespace {

struct Options {
  std::string scene = "two_walls";
  int dim = 2;
  std::string objective = "oavi";
  std::uint64_t seed = 1;
  int trials = 10;
  double duration = 120.0;
  std::string out = ".";
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  int cycles = 100;
  double snapshot_time = 30.0;

  double alpha_roi = 0.10;
  double alpha_pa = 0.15;
  double robot_range = 5.0;
  int robot_downsample = 2;
  double human_range = 10.0;
  int human_downsample = 4;
  double fov_percentage = 40.0;
  double mapping_hz = 10.0;
  double planning_hz = 1.0;
  double resolution = 0.3;
  std::vector<double> bounds;
  int primitives = 21;
  double v_max = 0.75;
  double yaw_rate_max = 0.25;
  double radius = 0.3;
};

void add_common(CLI::App& app, Options& o) {
  app.add_option("--scene", o.scene, "Built-in scene (single_wall, two_walls, multi_obstacle) or JSON scene file")
      ->capture_default_str();
  app.add_option("--dim", o.dim, "Built-in scene dimension")->check(CLI::IsMember({2, 3}))->capture_default_str();
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
  auto* table = "Simulation parameters";
  app.add_option("--alpha-roi", o.alpha_roi, "OAVI weight outside the ROI")->group(table)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  app.add_option("--alpha-pa", o.alpha_pa, "OAVI weight away from occluders")->group(table)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  app.add_option("--robot-range", o.robot_range, "Robot sensor range (m)")->group(table)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--robot-downsample", o.robot_downsample, "Robot sensor downsampling")->group(table)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--human-range", o.human_range, "Human sensor range (m)")->group(table)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--human-downsample", o.human_downsample, "Human sensor downsampling")->group(table)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--fov-percentage", o.fov_percentage, "Human FoV percentage marked as ROI")->group(table)->check(CLI::Range(1e-6, 100.0))->capture_default_str();
  app.add_option("--mapping-hz", o.mapping_hz, "Mapping frequency")->group(table)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--planning-hz", o.planning_hz, "Planning frequency")->group(table)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--resolution", o.resolution, "Voxel resolution (m)")->group(table)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--bounds", o.bounds, "Grid bounding box size (m), 2 or 3 values")->group(table)->expected(2, 3);
  app.add_option("--primitives", o.primitives, "Number of motion primitives")->group(table)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--v-max", o.v_max, "Max forward velocity (m/s)")->group(table)->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--yaw-rate-max", o.yaw_rate_max, "Max yaw rate (rad/s)")->group(table)->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--radius", o.radius, "Robot radius used for collision checks (m)")->group(table)->check(CLI::PositiveNumber)->capture_default_str();
}

void add_objective(CLI::App& app, Options& o) {
  app.add_option("--objective", o.objective, "csqmi, roi-csqmi or oavi")
      ->check(CLI::IsMember({"csqmi", "roi-csqmi", "oavi"}))
      ->capture_default_str();
}

TrialConfig make_config(const Options& o) {
  Environment env = resolve_scene(o.scene, o.dim);
  if (o.resolution != env.resolution) env.resolution = o.resolution;
  if (!o.bounds.empty()) {
    if (static_cast<int>(o.bounds.size()) != env.dim)
      throw std::invalid_argument("--bounds needs " + std::to_string(env.dim) + " values for this scene");
    for (int a = 0; a < env.dim; ++a) env.bounds.max[a] = env.bounds.min[a] + o.bounds[static_cast<std::size_t>(a)];
  }
  TrialConfig c = TrialConfig::defaults(std::move(env), parse_objective(o.objective));
  c.seed = o.seed;
  c.duration = o.duration;
  c.oavi.alpha_roi = o.alpha_roi;
  c.oavi.alpha_pa = o.alpha_pa;
  c.robot_camera.max_range = o.robot_range;
  c.robot_camera.downsample = o.robot_downsample;
  c.oavi.d_max = o.robot_range;
  c.human_camera.max_range = o.human_range;
  c.human_camera.downsample = o.human_downsample;
  c.roi_scale = o.fov_percentage / 100.0;
  c.mapping_period = 1.0 / o.mapping_hz;
  c.planning_period = 1.0 / o.planning_hz;
  c.library.count = o.primitives;
  c.library.v_max = o.v_max;
  c.library.yaw_rate_max = o.yaw_rate_max;
  c.library.duration = c.planning_period;
  c.safety.radius = o.radius;
  c.validate();
  generate_library(c.library);
  return c;
}

template <class F>
void write_file(const fs::path& path, F&& body) {
  auto f = detail::open_out(path);
  body(f);
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string seed_name(const char* stem, std::uint64_t seed, const char* ext) {
  return std::string(stem) + "_" + std::to_string(seed) + ext;
}

int cmd_run(const Options& o) {
  const TrialConfig cfg = make_config(o);
  fs::create_directories(o.out);
  const TrialResult r = run_trial(cfg);
  write_file(fs::path(o.out) / seed_name("entropy", cfg.seed, ".csv"), [&](std::ostream& os) { write_entropy_csv(os, r.series); });
  write_file(fs::path(o.out) / seed_name("plans", cfg.seed, ".csv"), [&](std::ostream& os) { write_plans_csv(os, r.plans); });
  const auto& last = r.series.back();
  std::cout << to_string(cfg.objective) << " seed " << cfg.seed << ": ROI entropy " << r.series.front().roi_entropy
            << " -> " << last.roi_entropy << " bits, map entropy " << last.map_entropy << " bits\n";
  return 0;
}

int cmd_batch(const Options& o) {
  const TrialConfig base = make_config(o);
  fs::create_directories(o.out);
  const auto outcomes = run_batch(base, o.trials, o.seed, o.jobs);
  std::vector<SummaryRow> rows;
  int failed = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& out = outcomes[i];
    rows.push_back(summarize(static_cast<int>(i), base.objective, out));
    if (!out.result) {
      ++failed;
      std::cerr << "trial " << i << " (seed " << out.seed << ") failed: " << out.error << "\n";
      continue;
    }
    write_file(fs::path(o.out) / seed_name("entropy", out.seed, ".csv"),
               [&](std::ostream& os) { write_entropy_csv(os, out.result->series); });
  }
  write_file(fs::path(o.out) / "summary.csv", [&](std::ostream& os) { write_summary_csv(os, rows); });
  std::cout << outcomes.size() - static_cast<std::size_t>(failed) << "/" << outcomes.size() << " trials completed\n";
  return 0;
}

int cmd_heatmap(const Options& o) {
  const TrialConfig cfg = make_config(o);
  if (cfg.env.dim != 2) throw std::invalid_argument("heatmap needs a 2D scene");
  fs::create_directories(o.out);
  GridMap map(cfg.env.dim, cfg.env.bounds, cfg.env.resolution);
  apply_human_observation(map, cfg);
  const Heatmap h = compute_heatmap(map, cfg.objective, cfg.robot_camera, cfg.oavi);
  const std::string stem = "heatmap_" + std::string(to_string(cfg.objective));
  auto save = [&](const std::string& name, const ScalarGrid& g) {
    write_file(fs::path(o.out) / (name + ".csv"), [&](std::ostream& os) { write_grid_csv(os, g); });
    write_file(fs::path(o.out) / (name + ".pgm"), [&](std::ostream& os) { write_pgm(os, g); });
  };
  save(stem, h.value);
  if (h.i_ua) {
    save("i_ua", *h.i_ua);
    save("i_roi", *h.i_roi);
    save("i_pa", *h.i_pa);
  }
  write_file(fs::path(o.out) / "occupancy.pgm", [&](std::ostream& os) { write_occupancy_pgm(os, map); });
  std::cout << "wrote " << stem << ".csv/.pgm to " << o.out << "\n";
  return 0;
}

int cmd_bench(const Options& o) {
  Options warm = o;
  warm.objective = "oavi";
  warm.duration = o.snapshot_time;
  const TrialConfig cfg = make_config(warm);
  fs::create_directories(o.out);
  const TrialResult snapshot = run_trial(cfg);
  const GridMap& map = *snapshot.final_map;
  const Pose pose = snapshot.series.back().pose;
  const PrimitiveLibrary lib = generate_library(cfg.library);

  std::vector<std::vector<double>> samples;
  const ObjectiveKind kinds[] = {ObjectiveKind::Csqmi, ObjectiveKind::RoiCsqmi, ObjectiveKind::Oavi};
  for (auto kind : kinds) {
    PlannerConfig planner{kind, cfg.oavi, cfg.robot_camera, cfg.safety, cfg.mapping_period};
    std::vector<double> t;
    for (int k = 0; k < o.cycles; ++k) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto sel = select_best(map, pose, lib, planner);
      const auto t1 = std::chrono::steady_clock::now();
      (void)sel;
      t.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    samples.push_back(std::move(t));
  }
  write_file(fs::path(o.out) / "bench.csv", [&](std::ostream& os) {
    os << "objective,cycles,mean_s,std_s\n";
    std::printf("%-10s %12s\n", "objective", "time (s)");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& t = samples[i];
      double mean = 0.0, var = 0.0;
      for (double v : t) mean += v;
      mean /= static_cast<double>(t.size());
      for (double v : t) var += (v - mean) * (v - mean);
      const double sd = t.size() > 1 ? std::sqrt(var / static_cast<double>(t.size() - 1)) : 0.0;
      os << to_string(kinds[i]) << ',' << t.size() << ',' << format_double(mean) << ',' << format_double(sd) << '\n';
      std::printf("%-10s %.4f ± %.4f\n", std::string(to_string(kinds[i])).c_str(), mean, sd);
    }
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ROI-guided active mapping simulator"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "Run one trial and write entropy_<seed>.csv and plans_<seed>.csv");
  add_common(*run, o);
  add_objective(*run, o);
  run->add_option("--seed", o.seed, "Random seed for the robot start")->capture_default_str();
  run->add_option("--duration", o.duration, "Trial length (s)")->check(CLI::NonNegativeNumber)->capture_default_str();

  auto* batch = app.add_subcommand("batch", "Run seeded trials and write per-trial entropy files plus summary.csv");
  add_common(*batch, o);
  add_objective(*batch, o);
  batch->add_option("--seed", o.seed, "Seed of the first trial")->capture_default_str();
  batch->add_option("--trials", o.trials, "Number of trials")->check(CLI::PositiveNumber)->capture_default_str();
  batch->add_option("--duration", o.duration, "Trial length (s)")->check(CLI::NonNegativeNumber)->capture_default_str();
  batch->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  auto* heat = app.add_subcommand("heatmap", "Score every free or unknown cell after the human observation");
  add_common(*heat, o);
  add_objective(*heat, o);

  auto* bench = app.add_subcommand("bench", "Time select_best for every objective on a mid-exploration map");
  add_common(*bench, o);
  bench->add_option("--seed", o.seed, "Seed of the snapshot trial")->capture_default_str();
  bench->add_option("--cycles", o.cycles, "Planning cycles per objective")->check(CLI::Range(1, 1000000))->capture_default_str();
  bench->add_option("--snapshot-time", o.snapshot_time, "Exploration time before the snapshot (s)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(o);
    if (*batch) return cmd_batch(o);
    if (*heat) return cmd_heatmap(o);
    if (*bench) return cmd_bench(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
