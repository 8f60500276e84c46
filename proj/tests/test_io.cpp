#include "roiexplore/io.hpp"
#include "roiexplore/simulator.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace roiex;

namespace {

const char* kScene = R"({
  "name": "corner",
  "bounds": {"min": [0, 0], "max": [12, 8]},
  "resolution": 0.3,
  "obstacles": [
    {"min": [6, 2], "max": [6.6, 6]}
  ],
  "human": {"position": [2, 4], "yaw": 0.1}
})";

std::string scene_error_where(const std::string& text) {
  try {
    load_environment(text);
  } catch (const SceneError& e) {
    return e.where();
  }
  return "<no error>";
}

}  // namespace

TEST(Numbers, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 1e300, 0.0, 123456.789})
    EXPECT_EQ(parse_double(format_double(v)), v);
  EXPECT_TRUE(std::isnan(parse_double("nan")));
  EXPECT_EQ(parse_double(" -inf "), -std::numeric_limits<double>::infinity());
  EXPECT_THROW(parse_double("1.5x"), std::invalid_argument);
}

TEST(EntropyCsv, RoundTripIsExact) {
  std::vector<Sample> s{{0.0, 812.3456789, 4000.125, Pose(Vec3(1.0 / 3, 2, 0), 0.7)},
                        {0.1, 800.0000001, 3999.5, Pose(Vec3(1.1, 2.05, 0.5), -3.0)}};
  std::stringstream ss;
  write_entropy_csv(ss, s);
  EXPECT_EQ(ss.str().substr(0, kEntropyHeader.size()), kEntropyHeader);
  const auto back = read_entropy_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(back[k].t, s[k].t);
    EXPECT_EQ(back[k].roi_entropy, s[k].roi_entropy);
    EXPECT_EQ(back[k].map_entropy, s[k].map_entropy);
    EXPECT_EQ(back[k].pose, s[k].pose);
  }
}

TEST(EntropyCsv, RejectsBadInput) {
  std::stringstream missing("a,b\n1,2\n");
  EXPECT_THROW(read_entropy_csv(missing), std::runtime_error);
  std::stringstream ragged(std::string(kEntropyHeader) + "\n0,1,2\n");
  EXPECT_THROW(read_entropy_csv(ragged), std::runtime_error);
}

TEST(SummaryCsv, RoundTrip) {
  std::vector<SummaryRow> rows(2);
  rows[0] = {0, 1, "oavi", 12.5, 3000.25, 4.2, 9.9, std::nullopt, ""};
  rows[1] = {1, 2, "csqmi", std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(),
             std::nullopt, std::nullopt, std::nullopt, "no free start, try again"};
  std::stringstream ss;
  write_summary_csv(ss, rows);
  const auto back = read_summary_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].objective, "oavi");
  EXPECT_EQ(back[0].final_roi_entropy, 12.5);
  EXPECT_EQ(back[0].t75, 9.9);
  EXPECT_FALSE(back[0].t90);
  EXPECT_TRUE(std::isnan(back[1].final_roi_entropy));
  EXPECT_EQ(back[1].seed, 2u);
  EXPECT_EQ(back[1].error, "no free start; try again");
}

TEST(GridCsv, RoundTripAndOrientation) {
  ScalarGrid g(3, 2);
  g.at(0, 0) = 1.0;
  g.at(2, 1) = 0.1;
  std::stringstream ss;
  write_grid_csv(ss, g);
  std::string first;
  std::getline(ss, first);
  EXPECT_EQ(first, "1,0,0");
  ss.seekg(0);
  const ScalarGrid back = read_grid_csv(ss);
  EXPECT_EQ(back.nx, 3);
  EXPECT_EQ(back.ny, 2);
  EXPECT_EQ(back.values, g.values);
}

TEST(Pgm, HeaderAndScaling) {
  ScalarGrid g(2, 2);
  g.at(0, 0) = -1.0;
  g.at(1, 1) = 3.0;
  std::stringstream ss;
  write_pgm(ss, g);
  EXPECT_EQ(ss.str(), "P2\n2 2\n255\n64 255\n0 64\n");
  std::stringstream flat;
  write_pgm(flat, ScalarGrid(2, 1, 5.0));
  EXPECT_EQ(flat.str(), "P2\n2 1\n255\n0 0\n");
}

TEST(Pgm, OccupancyWhiteIsFree) {
  GridMap m(2, {Vec3(0, 0, 0), Vec3(0.6, 0.3, 0)}, 0.3);
  m.at({0, 0, 0}).log_odds = -1000.0;
  m.at({1, 0, 0}).log_odds = 1000.0;
  std::stringstream ss;
  write_occupancy_pgm(ss, m);
  EXPECT_EQ(ss.str(), "P2\n2 1\n255\n255 0\n");
  EXPECT_THROW(write_occupancy_pgm(ss, m, 1), std::out_of_range);
}

TEST(GridDump, RoundTrip) {
  GridMap m(3, {Vec3(0, 0, 0), Vec3(0.9, 0.6, 0.6)}, 0.3);
  for (std::size_t k = 0; k < m.size(); ++k) {
    m.cells()[k].log_odds = 0.37 * static_cast<double>(k) - 3.0;
    m.cells()[k].roi = k % 3 == 0;
    if (k % 2) m.cells()[k].dist = 0.3 * static_cast<double>(k);
  }
  std::stringstream ss;
  write_grid_dump(ss, m);
  GridMap back(3, {Vec3(0, 0, 0), Vec3(0.9, 0.6, 0.6)}, 0.3);
  read_grid_dump(ss, back);
  for (std::size_t k = 0; k < m.size(); ++k) {
    EXPECT_NEAR(back.cells()[k].occupancy(), m.cells()[k].occupancy(), 1e-15);
    EXPECT_EQ(back.cells()[k].roi, m.cells()[k].roi);
    EXPECT_EQ(back.cells()[k].dist, m.cells()[k].dist);
  }
  std::stringstream bad("0 0 0 0.5 1\n");
  EXPECT_THROW(read_grid_dump(bad, back), std::runtime_error);
  std::stringstream outside("9 0 0 0.5 1 0\n");
  EXPECT_THROW(read_grid_dump(outside, back), std::runtime_error);
}

TEST(ScanText, RoundTrip) {
  const Environment env = builtin_scene("single_wall");
  const Scan s = simulate_scan(env, Pose(Vec3(5, 15, 0), 0.2), CameraModel{1.5184, 1.0123, 90, 60, 5.0, 2});
  std::stringstream ss;
  write_scan(ss, s);
  const Scan back = read_scan(ss, 5.0);
  ASSERT_EQ(back.rays.size(), s.rays.size());
  EXPECT_EQ(back.origin.position, s.origin.position);
  for (std::size_t k = 0; k < s.rays.size(); ++k) {
    EXPECT_EQ(back.rays[k].hit, s.rays[k].hit);
    EXPECT_EQ(back.rays[k].direction, s.rays[k].direction);
    EXPECT_EQ(back.rays[k].endpoint, s.rays[k].endpoint);
  }
}

TEST(SceneFile, Loads) {
  const Environment env = load_environment(kScene);
  EXPECT_EQ(env.name, "corner");
  EXPECT_EQ(env.dim, 2);
  ASSERT_EQ(env.obstacles.size(), 1u);
  EXPECT_EQ(env.obstacles[0].max, Vec3(6.6, 6, 0));
  EXPECT_DOUBLE_EQ(env.human.yaw, 0.1);
  EXPECT_FALSE(env.robot);
}

TEST(SceneFile, SyntaxErrorReportsLine) {
  std::string text = kScene;
  text.replace(text.find("\"resolution\": 0.3,"), 18, "\"resolution\": 0.3");
  const std::string where = scene_error_where(text);
  EXPECT_EQ(where.rfind("line 5:", 0), 0u) << where;
}

TEST(SceneFile, FieldErrorsReportPath) {
  std::string text = kScene;
  text.replace(text.find("[6.6, 6]"), 8, "[6.6, \"6\"]");
  EXPECT_EQ(scene_error_where(text), "obstacles[0].max[1]");

  text = kScene;
  text.replace(text.find("[6.6, 6]"), 8, "[6.6, 6, 1]");
  EXPECT_EQ(scene_error_where(text), "obstacles[0].max");

  text = kScene;
  text.replace(text.find("\"resolution\": 0.3,"), 18, "");
  EXPECT_EQ(scene_error_where(text), "resolution");
}

TEST(SceneFile, ValidationFailures) {
  std::string text = kScene;
  text.replace(text.find("[6.6, 6]"), 8, "[6.6, 60]");
  EXPECT_EQ(scene_error_where(text), "scene");
  text = kScene;
  text.replace(text.find("[2, 4]"), 6, "[6.3, 4]");
  EXPECT_EQ(scene_error_where(text), "scene");
}

TEST(SceneFile, EmptyObstacleListIsValid) {
  std::string text = kScene;
  text.replace(text.find("{\"min\": [6, 2], \"max\": [6.6, 6]}"), 32, "");
  EXPECT_TRUE(load_environment(text).obstacles.empty());
}

TEST(SceneFile, BuiltinsRoundTripThroughJson) {
  for (const char* name : {"single_wall", "two_walls", "multi_obstacle"})
    for (int dim : {2, 3}) {
      const Environment env = builtin_scene(name, dim);
      const Environment back = load_environment(environment_to_json(env));
      EXPECT_EQ(back.dim, env.dim);
      EXPECT_EQ(back.name, env.name);
      EXPECT_EQ(back.bounds.min, env.bounds.min);
      EXPECT_EQ(back.bounds.max, env.bounds.max);
      ASSERT_EQ(back.obstacles.size(), env.obstacles.size());
      for (std::size_t k = 0; k < env.obstacles.size(); ++k) {
        EXPECT_EQ(back.obstacles[k].min, env.obstacles[k].min);
        EXPECT_EQ(back.obstacles[k].max, env.obstacles[k].max);
      }
      EXPECT_EQ(back.human, env.human);
    }
}

TEST(SceneFile, MissingFile) {
  EXPECT_THROW(load_environment_file("/nonexistent/scene.json"), std::runtime_error);
  EXPECT_THROW(resolve_scene("/nonexistent/scene.json"), std::runtime_error);
  EXPECT_EQ(resolve_scene("two_walls").obstacles.size(), 2u);
}
