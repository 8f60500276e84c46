#pragma once

#include "roiexplore/environment.hpp"
#include "roiexplore/grid_map.hpp"
#include "roiexplore/objectives.hpp"
#include "roiexplore/sensor.hpp"
#include "roiexplore/simulator.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace roiex {

// ---------------------------------------------------------------------------
// Numbers

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

namespace detail {
inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  return f;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Entropy series

inline constexpr std::string_view kEntropyHeader = "t,roi_entropy_bits,map_entropy_bits,x,y,z,yaw";

inline void write_entropy_csv(std::ostream& os, const std::vector<Sample>& series) {
  os << kEntropyHeader << '\n';
  for (const auto& s : series) {
    os << format_double(s.t) << ',' << format_double(s.roi_entropy) << ',' << format_double(s.map_entropy) << ','
       << format_double(s.pose.position.x()) << ',' << format_double(s.pose.position.y()) << ','
       << format_double(s.pose.position.z()) << ',' << format_double(s.pose.yaw) << '\n';
  }
}

inline std::vector<Sample> read_entropy_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.substr(0, kEntropyHeader.size()) != kEntropyHeader)
    throw std::runtime_error("entropy csv: missing header");
  std::vector<Sample> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 7) throw std::runtime_error("entropy csv line " + std::to_string(lineno) + ": expected 7 fields");
    Sample s;
    s.t = parse_double(f[0]);
    s.roi_entropy = parse_double(f[1]);
    s.map_entropy = parse_double(f[2]);
    s.pose.position = Vec3(parse_double(f[3]), parse_double(f[4]), parse_double(f[5]));
    s.pose.yaw = parse_double(f[6]);
    out.push_back(s);
  }
  return out;
}

inline void write_plans_csv(std::ostream& os, const std::vector<PlanRecord>& plans) {
  os << "t,primitive,score,roi_score,non_roi_score,roi_cells_in_view,latency_s\n";
  for (const auto& p : plans)
    os << format_double(p.t) << ',' << p.primitive << ',' << format_double(p.score) << ','
       << format_double(p.roi_score) << ',' << format_double(p.non_roi_score) << ',' << p.roi_cells_in_view << ','
       << format_double(p.latency_s) << '\n';
}

// ---------------------------------------------------------------------------
// Batch summary

struct SummaryRow {
  int trial = 0;
  std::uint64_t seed = 0;
  std::string objective;
  double final_roi_entropy = 0.0;
  double final_map_entropy = 0.0;
  std::optional<double> t50, t75, t90;
  std::string error;
};

inline SummaryRow summarize(int trial, ObjectiveKind kind, const TrialOutcome& out) {
  SummaryRow row;
  row.trial = trial;
  row.seed = out.seed;
  row.objective = std::string(to_string(kind));
  if (!out.result) {
    row.final_roi_entropy = row.final_map_entropy = std::numeric_limits<double>::quiet_NaN();
    row.error = out.error;
    return row;
  }
  const auto& r = *out.result;
  row.final_roi_entropy = r.series.back().roi_entropy;
  row.final_map_entropy = r.series.back().map_entropy;
  row.t50 = time_to_reduction(r, 0.50);
  row.t75 = time_to_reduction(r, 0.75);
  row.t90 = time_to_reduction(r, 0.90);
  return row;
}

inline constexpr std::string_view kSummaryHeader =
    "trial,seed,objective,final_roi_entropy_bits,final_map_entropy_bits,t50_s,t75_s,t90_s,error";

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  os << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << r.trial << ',' << r.seed << ',' << r.objective << ',' << format_double(r.final_roi_entropy) << ','
       << format_double(r.final_map_entropy) << ',' << opt(r.t50) << ',' << opt(r.t75) << ',' << opt(r.t90) << ','
       << err << '\n';
  }
}

inline std::vector<SummaryRow> read_summary_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.substr(0, kSummaryHeader.size()) != kSummaryHeader)
    throw std::runtime_error("summary csv: missing header");
  auto opt = [](std::string_view s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    return parse_double(s);
  };
  std::vector<SummaryRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 9) throw std::runtime_error("summary csv: expected 9 fields");
    SummaryRow r;
    r.trial = std::stoi(std::string(f[0]));
    r.seed = std::stoull(std::string(f[1]));
    r.objective = std::string(f[2]);
    r.final_roi_entropy = parse_double(f[3]);
    r.final_map_entropy = parse_double(f[4]);
    r.t50 = opt(f[5]);
    r.t75 = opt(f[6]);
    r.t90 = opt(f[7]);
    r.error = std::string(f[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// 2D scalar grids (heatmaps, slices)

/// Row-major nx x ny field, row 0 at the lowest y.
struct ScalarGrid {
  int nx = 0;
  int ny = 0;
  std::vector<double> values;

  ScalarGrid() = default;
  ScalarGrid(int nx_in, int ny_in, double fill = 0.0)
      : nx(nx_in), ny(ny_in), values(static_cast<std::size_t>(nx_in) * static_cast<std::size_t>(ny_in), fill) {}

  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(x)]; }
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(x)]; }
};

inline void write_grid_csv(std::ostream& os, const ScalarGrid& g) {
  for (int y = 0; y < g.ny; ++y) {
    for (int x = 0; x < g.nx; ++x) os << (x ? "," : "") << format_double(g.at(x, y));
    os << '\n';
  }
}

inline ScalarGrid read_grid_csv(std::istream& is) {
  ScalarGrid g;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (g.ny == 0) g.nx = static_cast<int>(f.size());
    if (static_cast<int>(f.size()) != g.nx) throw std::runtime_error("grid csv: ragged row " + std::to_string(g.ny + 1));
    for (auto s : f) g.values.push_back(parse_double(s));
    ++g.ny;
  }
  return g;
}

/// Plain PGM with per-file min-max scaling; +y is up in the image.
inline void write_pgm(std::ostream& os, const ScalarGrid& g) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : g.values)
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  const double span = hi > lo ? hi - lo : 0.0;
  os << "P2\n" << g.nx << ' ' << g.ny << "\n255\n";
  for (int y = g.ny - 1; y >= 0; --y) {
    for (int x = 0; x < g.nx; ++x) {
      const double v = g.at(x, y);
      const int p = span > 0.0 && std::isfinite(v) ? static_cast<int>(std::lround(255.0 * (v - lo) / span)) : 0;
      os << (x ? " " : "") << p;
    }
    os << '\n';
  }
}

/// Occupancy of one z layer, o in [0, 1] mapped linearly so free is white.
inline void write_occupancy_pgm(std::ostream& os, const GridMap& map, int iz = 0) {
  const auto& ext = map.extents();
  if (iz < 0 || iz >= ext[2]) throw std::out_of_range("write_occupancy_pgm: layer outside map");
  os << "P2\n" << ext[0] << ' ' << ext[1] << "\n255\n";
  for (int y = ext[1] - 1; y >= 0; --y) {
    for (int x = 0; x < ext[0]; ++x) {
      const double o = map.at({x, y, iz}).occupancy();
      os << (x ? " " : "") << std::lround(255.0 * (1.0 - o));
    }
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Map and scan text dumps

inline void write_grid_dump(std::ostream& os, const GridMap& map) {
  for (std::size_t k = 0; k < map.size(); ++k) {
    const CellIndex i = map.unlinear(k);
    const auto& c = map.cells()[k];
    os << i[0] << ' ' << i[1] << ' ' << i[2] << ' ' << format_double(c.occupancy()) << ' ' << (c.roi ? 1 : 0) << ' '
       << format_double(c.dist) << '\n';
  }
}

/// Loads a dump written for a map of the same geometry.
inline void read_grid_dump(std::istream& is, GridMap& map) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto f = detail::split_ws(line);
    if (f.empty()) continue;
    if (f.size() != 6) throw std::runtime_error("grid dump line " + std::to_string(lineno) + ": expected 6 fields");
    const CellIndex i{std::stoi(std::string(f[0])), std::stoi(std::string(f[1])), std::stoi(std::string(f[2]))};
    if (!map.in_bounds(i)) throw std::runtime_error("grid dump line " + std::to_string(lineno) + ": index outside map");
    const double o = parse_double(f[3]);
    auto& c = map.at(i);
    c.log_odds = std::log(o / (1.0 - o));
    c.roi = f[4] == "1";
    c.dist = parse_double(f[5]);
  }
}

inline void write_scan(std::ostream& os, const Scan& scan) {
  const Vec3& o = scan.origin.position;
  for (const auto& r : scan.rays) {
    os << format_double(o.x()) << ' ' << format_double(o.y()) << ' ' << format_double(o.z()) << ' '
       << format_double(r.direction.x()) << ' ' << format_double(r.direction.y()) << ' '
       << format_double(r.direction.z()) << ' ' << (r.hit ? 1 : 0) << ' ' << format_double(r.endpoint.x()) << ' '
       << format_double(r.endpoint.y()) << ' ' << format_double(r.endpoint.z()) << '\n';
  }
}

/// Rays only; the origin yaw is not part of the format.
inline Scan read_scan(std::istream& is, double max_range) {
  Scan s;
  s.max_range = max_range;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto f = detail::split_ws(line);
    if (f.empty()) continue;
    if (f.size() != 10) throw std::runtime_error("scan line " + std::to_string(lineno) + ": expected 10 fields");
    double v[10];
    for (int k = 0; k < 10; ++k) v[k] = parse_double(f[static_cast<std::size_t>(k)]);
    s.origin.position = Vec3(v[0], v[1], v[2]);
    s.rays.push_back({Vec3(v[3], v[4], v[5]), v[6] != 0.0, Vec3(v[7], v[8], v[9])});
  }
  return s;
}

// ---------------------------------------------------------------------------
// Scene files

/// Malformed or invalid scene description. `where` is "line:col" for syntax
/// errors or a field path such as "obstacles[2].max".
class SceneError : public std::runtime_error {
 public:
  SceneError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

namespace detail {
using json = nlohmann::json;

inline const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw SceneError(path.empty() ? "<root>" : path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SceneError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SceneError(path, "expected a number");
  return v.get<double>();
}

inline Vec3 point(const json& v, const std::string& path, int& dim) {
  if (!v.is_array() || (v.size() != 2 && v.size() != 3)) throw SceneError(path, "expected an array of 2 or 3 numbers");
  const int n = static_cast<int>(v.size());
  if (dim == 0) dim = n;
  if (n != dim) throw SceneError(path, "expected " + std::to_string(dim) + " coordinates, got " + std::to_string(n));
  Vec3 p = Vec3::Zero();
  for (int a = 0; a < n; ++a) p[a] = number(v[static_cast<std::size_t>(a)], path + "[" + std::to_string(a) + "]");
  return p;
}

inline Box box(const json& v, const std::string& path, int& dim) {
  return {point(field(v, "min", path), path + ".min", dim), point(field(v, "max", path), path + ".max", dim)};
}

inline Pose pose(const json& v, const std::string& path, int& dim) {
  const Vec3 p = point(field(v, "position", path), path + ".position", dim);
  const double yaw = v.contains("yaw") ? number(v["yaw"], path + ".yaw") : 0.0;
  const double pitch = v.contains("pitch") ? number(v["pitch"], path + ".pitch") : 0.0;
  return Pose(p, yaw, pitch);
}

inline std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ":" + std::to_string(col);
}
}  // namespace detail

/// Parses and validates a JSON scene. The dimension follows the length of
/// bounds.min.
inline Environment load_environment(std::string_view text) {
  detail::json doc;
  try {
    doc = detail::json::parse(text.begin(), text.end());
  } catch (const detail::json::parse_error& e) {
    std::string msg = e.what();
    if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw SceneError(detail::line_col(text, e.byte == 0 ? 0 : e.byte - 1), msg);
  }
  Environment env;
  int dim = 0;
  env.name = doc.contains("name") && doc["name"].is_string() ? doc["name"].get<std::string>() : "scene";
  env.bounds = detail::box(detail::field(doc, "bounds", ""), "bounds", dim);
  env.dim = dim;
  env.resolution = detail::number(detail::field(doc, "resolution", ""), "resolution");
  if (doc.contains("obstacles")) {
    const auto& obs = doc["obstacles"];
    if (!obs.is_array()) throw SceneError("obstacles", "expected an array");
    for (std::size_t k = 0; k < obs.size(); ++k)
      env.obstacles.push_back(detail::box(obs[k], "obstacles[" + std::to_string(k) + "]", dim));
  }
  env.human = detail::pose(detail::field(doc, "human", ""), "human", dim);
  if (doc.contains("robot") && !doc["robot"].is_null()) env.robot = detail::pose(doc["robot"], "robot", dim);
  try {
    env.validate();
  } catch (const std::invalid_argument& e) {
    throw SceneError("scene", e.what());
  }
  return env;
}

inline Environment load_environment_file(const std::filesystem::path& path) {
  auto f = detail::open_in(path);
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return load_environment(ss.str());
  } catch (const SceneError& e) {
    throw SceneError(path.string() + ": " + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

inline std::string environment_to_json(const Environment& env) {
  using detail::json;
  auto pt = [&](const Vec3& p) {
    json a = json::array();
    for (int k = 0; k < env.dim; ++k) a.push_back(p[k]);
    return a;
  };
  auto bx = [&](const Box& b) { return json{{"min", pt(b.min)}, {"max", pt(b.max)}}; };
  json doc;
  doc["name"] = env.name;
  doc["bounds"] = bx(env.bounds);
  doc["resolution"] = env.resolution;
  doc["obstacles"] = json::array();
  for (const auto& b : env.obstacles) doc["obstacles"].push_back(bx(b));
  doc["human"] = {{"position", pt(env.human.position)}, {"yaw", env.human.yaw}};
  if (env.dim == 3) doc["human"]["pitch"] = env.human.pitch;
  if (env.robot) doc["robot"] = {{"position", pt(env.robot->position)}, {"yaw", env.robot->yaw}};
  return doc.dump(2) + "\n";
}

/// Built-in scene name or path to a JSON scene file.
inline Environment resolve_scene(const std::string& scene, int dim = 2) {
  if (is_builtin_scene(scene)) return builtin_scene(scene, dim);
  return load_environment_file(scene);
}

}  // namespace roiex
