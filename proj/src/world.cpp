// Copyright 2026 Resilient Planner Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "resilient/world.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace resilient {

namespace {

using json = nlohmann::ordered_json;

// Portable uniform double in [lo, hi) from raw engine output.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

Vec3 toVec3(const json& j, const char* field) {
  if (!j.is_array() || j.size() != 3) {
    throw ScenarioError(std::string("field '") + field + "' must be a 3-element array");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json fromVec3(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void maybeVec3(const json& j, const char* key, Vec3& out) {
  if (j.contains(key)) out = toVec3(j.at(key), key);
}

void maybeVec4(const json& j, const char* key, Vec4& out) {
  if (j.contains(key)) {
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != 4) {
      throw ScenarioError(std::string("field '") + key + "' must be a 4-element array");
    }
    for (int i = 0; i < 4; ++i) out(i) = a[i].get<double>();
  }
}

PlannerParams paramsFromJson(const json& j) {
  PlannerParams p;
  maybe(j, "mass_kg", p.mass_kg);
  maybe(j, "gravity_mps2", p.gravity_mps2);
  maybe(j, "drag_coeff_ns_per_m", p.drag_coeff_ns_per_m);
  maybe(j, "body_radius_m", p.body_radius_m);
  maybe(j, "body_height_m", p.body_height_m);
  maybe(j, "ts_s", p.ts_s);
  maybe(j, "horizon", p.horizon);
  maybe(j, "force_noise_bound_mps2", p.force_noise_bound_mps2);
  maybe(j, "v_max_mps", p.v_max_mps);
  maybe(j, "rate_max_radps", p.rate_max_radps);
  maybe(j, "thrust_min_n", p.thrust_min_n);
  maybe(j, "thrust_max_hover_factor", p.thrust_max_hover_factor);
  maybe(j, "tilt_max_rad", p.tilt_max_rad);
  maybeVec3(j, "w_pos", p.w_pos);
  maybe(j, "w_yaw", p.w_yaw);
  maybeVec3(j, "w_pos_terminal", p.w_pos_terminal);
  maybe(j, "w_yaw_terminal", p.w_yaw_terminal);
  maybeVec3(j, "w_vel_terminal", p.w_vel_terminal);
  maybeVec4(j, "w_input", p.w_input);
  maybeVec4(j, "w_input_rate", p.w_input_rate);
  maybe(j, "slack_penalty", p.slack_penalty);
  maybe(j, "search_accel_max_mps2", p.search_accel_max_mps2);
  maybe(j, "search_durations_s", p.search_durations_s);
  maybe(j, "search_time_weight", p.search_time_weight);
  maybe(j, "goal_pos_tol_m", p.goal_pos_tol_m);
  maybe(j, "goal_vel_tol_mps", p.goal_vel_tol_mps);
  maybe(j, "search_pos_voxel_m", p.search_pos_voxel_m);
  maybe(j, "search_vel_voxel_mps", p.search_vel_voxel_mps);
  maybe(j, "search_node_budget", p.search_node_budget);
  maybe(j, "yaw_deadband_mps", p.yaw_deadband_mps);
  maybe(j, "box_max_extent_m", p.box_max_extent_m);
  maybe(j, "corridor_box_budget", p.corridor_box_budget);
  maybe(j, "frs_seed_variance_m2", p.frs_seed_variance_m2);
  maybe(j, "sqp_max_iters", p.sqp_max_iters);
  maybe(j, "kkt_tol", p.kkt_tol);
  maybe(j, "slack_tol_m", p.slack_tol_m);
  maybe(j, "sim_dt_s", p.sim_dt_s);
  maybe(j, "sim_force_noise_n", p.sim_force_noise_n);
  maybe(j, "observer_tau_s", p.observer_tau_s);
  maybe(j, "track_divergence_m", p.track_divergence_m);
  maybe(j, "braking_max_ticks", p.braking_max_ticks);
  maybe(j, "mission_timeout_s", p.mission_timeout_s);
  return p;
}

json paramsToJson(const PlannerParams& p) {
  json j;
  j["mass_kg"] = p.mass_kg;
  j["gravity_mps2"] = p.gravity_mps2;
  j["drag_coeff_ns_per_m"] = p.drag_coeff_ns_per_m;
  j["body_radius_m"] = p.body_radius_m;
  j["body_height_m"] = p.body_height_m;
  j["ts_s"] = p.ts_s;
  j["horizon"] = p.horizon;
  j["force_noise_bound_mps2"] = p.force_noise_bound_mps2;
  j["v_max_mps"] = p.v_max_mps;
  j["rate_max_radps"] = p.rate_max_radps;
  j["thrust_min_n"] = p.thrust_min_n;
  j["thrust_max_hover_factor"] = p.thrust_max_hover_factor;
  j["tilt_max_rad"] = p.tilt_max_rad;
  j["w_pos"] = fromVec3(p.w_pos);
  j["w_yaw"] = p.w_yaw;
  j["w_pos_terminal"] = fromVec3(p.w_pos_terminal);
  j["w_yaw_terminal"] = p.w_yaw_terminal;
  j["w_vel_terminal"] = fromVec3(p.w_vel_terminal);
  j["w_input"] = json::array({p.w_input(0), p.w_input(1), p.w_input(2), p.w_input(3)});
  j["w_input_rate"] =
      json::array({p.w_input_rate(0), p.w_input_rate(1), p.w_input_rate(2), p.w_input_rate(3)});
  j["slack_penalty"] = p.slack_penalty;
  j["search_accel_max_mps2"] = p.search_accel_max_mps2;
  j["search_durations_s"] = p.search_durations_s;
  j["search_time_weight"] = p.search_time_weight;
  j["goal_pos_tol_m"] = p.goal_pos_tol_m;
  j["goal_vel_tol_mps"] = p.goal_vel_tol_mps;
  j["search_pos_voxel_m"] = p.search_pos_voxel_m;
  j["search_vel_voxel_mps"] = p.search_vel_voxel_mps;
  j["search_node_budget"] = p.search_node_budget;
  j["yaw_deadband_mps"] = p.yaw_deadband_mps;
  j["box_max_extent_m"] = p.box_max_extent_m;
  j["corridor_box_budget"] = p.corridor_box_budget;
  j["frs_seed_variance_m2"] = p.frs_seed_variance_m2;
  j["sqp_max_iters"] = p.sqp_max_iters;
  j["kkt_tol"] = p.kkt_tol;
  j["slack_tol_m"] = p.slack_tol_m;
  j["sim_dt_s"] = p.sim_dt_s;
  j["sim_force_noise_n"] = p.sim_force_noise_n;
  j["observer_tau_s"] = p.observer_tau_s;
  j["track_divergence_m"] = p.track_divergence_m;
  j["braking_max_ticks"] = p.braking_max_ticks;
  j["mission_timeout_s"] = p.mission_timeout_s;
  return j;
}

MapSpec mapSpecFromJson(const json& j) {
  MapSpec m;
  maybe(j, "generator", m.generator);
  maybeVec3(j, "origin_m", m.origin_m);
  maybeVec3(j, "size_m", m.size_m);
  maybe(j, "resolution_m", m.resolution_m);
  maybe(j, "side_walls", m.side_walls);
  maybe(j, "gate_x_m", m.gate_x_m);
  maybe(j, "gap_width_m", m.gap_width_m);
  maybe(j, "gap_jitter_m", m.gap_jitter_m);
  maybe(j, "wall_thickness_m", m.wall_thickness_m);
  maybe(j, "pillar_count", m.pillar_count);
  maybe(j, "pillar_radius_m", m.pillar_radius_m);
  if (j.contains("keep_clear")) {
    for (const auto& kc : j.at("keep_clear")) {
      m.keep_clear.emplace_back(toVec3(kc.at(0), "keep_clear"), kc.at(1).get<double>());
    }
  }
  return m;
}

json mapSpecToJson(const MapSpec& m) {
  json j;
  j["generator"] = m.generator;
  j["origin_m"] = fromVec3(m.origin_m);
  j["size_m"] = fromVec3(m.size_m);
  j["resolution_m"] = m.resolution_m;
  j["side_walls"] = m.side_walls;
  j["gate_x_m"] = m.gate_x_m;
  j["gap_width_m"] = m.gap_width_m;
  j["gap_jitter_m"] = m.gap_jitter_m;
  j["wall_thickness_m"] = m.wall_thickness_m;
  j["pillar_count"] = m.pillar_count;
  j["pillar_radius_m"] = m.pillar_radius_m;
  if (!m.keep_clear.empty()) {
    json kcs = json::array();
    for (const auto& [c, r] : m.keep_clear) kcs.push_back(json::array({fromVec3(c), r}));
    j["keep_clear"] = kcs;
  }
  return j;
}

}  // namespace

OccupancyGrid::OccupancyGrid(const Vec3& origin, double resolution, const Eigen::Vector3i& dims)
    : origin_(origin), resolution_(resolution), dims_(dims) {
  if (resolution <= 0.0) throw ScenarioError("grid resolution must be positive");
  if ((dims.array() < 1).any()) throw ScenarioError("grid dims must all be >= 1");
  cells_.assign(static_cast<std::size_t>(dims(0)) * dims(1) * dims(2), 0);
}

Eigen::Vector3i OccupancyGrid::cellIndex(const Vec3& p) const {
  const Vec3 rel = (p - origin_) / resolution_;
  return Eigen::Vector3i(static_cast<int>(std::floor(rel(0))),
                         static_cast<int>(std::floor(rel(1))),
                         static_cast<int>(std::floor(rel(2))));
}

bool OccupancyGrid::inBounds(const Eigen::Vector3i& c) const {
  return (c.array() >= 0).all() && (c.array() < dims_.array()).all();
}

Vec3 OccupancyGrid::cellCenter(const Eigen::Vector3i& c) const {
  return origin_ + resolution_ * (c.cast<double>() + Vec3::Constant(0.5));
}

std::size_t OccupancyGrid::linearIndex(const Eigen::Vector3i& c) const {
  return static_cast<std::size_t>(c(0)) +
         static_cast<std::size_t>(dims_(0)) * (static_cast<std::size_t>(c(1)) +
                                               static_cast<std::size_t>(dims_(1)) * c(2));
}

bool OccupancyGrid::isOccupied(const Vec3& p) const { return isOccupiedCell(cellIndex(p)); }

bool OccupancyGrid::isOccupiedCell(const Eigen::Vector3i& c) const {
  if (!inBounds(c)) return true;
  return cells_[linearIndex(c)] != 0;
}

void OccupancyGrid::setOccupied(const Eigen::Vector3i& c, bool occupied) {
  if (!inBounds(c)) return;
  cells_[linearIndex(c)] = occupied ? 1 : 0;
  any_occupied_ = any_occupied_ || occupied;
}

void OccupancyGrid::occupyBox(const Vec3& min_corner, const Vec3& max_corner) {
  const Eigen::Vector3i lo = cellIndex(min_corner).cwiseMax(Eigen::Vector3i::Zero());
  const Eigen::Vector3i hi =
      cellIndex(max_corner - Vec3::Constant(1e-9)).cwiseMin(dims_ - Eigen::Vector3i::Ones());
  for (int z = lo(2); z <= hi(2); ++z)
    for (int y = lo(1); y <= hi(1); ++y)
      for (int x = lo(0); x <= hi(0); ++x) setOccupied({x, y, z});
}

bool OccupancyGrid::segmentFree(const Vec3& a, const Vec3& b, double step) const {
  if (step <= 0.0) throw std::invalid_argument("segmentFree: step must be positive");
  const double len = (b - a).norm();
  const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
  for (int i = 0; i <= n; ++i) {
    const Vec3 p = a + (static_cast<double>(i) / n) * (b - a);
    if (isOccupied(p)) return false;
  }
  return true;
}

OccupancyGrid OccupancyGrid::inflate(double radius) const {
  OccupancyGrid out(origin_, resolution_, dims_);
  if (radius <= 0.0) {
    out.cells_ = cells_;
    out.any_occupied_ = any_occupied_;
    return out;
  }
  const int reach = static_cast<int>(std::ceil(radius / resolution_));
  std::vector<Eigen::Vector3i> kernel;
  for (int z = -reach; z <= reach; ++z)
    for (int y = -reach; y <= reach; ++y)
      for (int x = -reach; x <= reach; ++x) {
        if (resolution_ * Vec3(x, y, z).norm() <= radius) kernel.push_back({x, y, z});
      }
  for (int z = 0; z < dims_(2); ++z)
    for (int y = 0; y < dims_(1); ++y)
      for (int x = 0; x < dims_(0); ++x) {
        const Eigen::Vector3i c(x, y, z);
        if (!cells_[linearIndex(c)]) continue;
        for (const auto& k : kernel) out.setOccupied(c + k);
      }
  return out;
}

double OccupancyGrid::clearance(const Vec3& p, double cap) const {
  if (!any_occupied_) return cap;
  const Eigen::Vector3i c0 = cellIndex(p);
  const int max_shell = static_cast<int>(std::ceil(cap / resolution_)) + 1;
  double best = cap;
  for (int shell = 0; shell <= max_shell; ++shell) {
    // Once a hit exists, cells farther than one shell beyond it cannot win.
    if (best < (shell - 1) * resolution_) break;
    for (int z = -shell; z <= shell; ++z)
      for (int y = -shell; y <= shell; ++y)
        for (int x = -shell; x <= shell; ++x) {
          if (std::max({std::abs(x), std::abs(y), std::abs(z)}) != shell) continue;
          const Eigen::Vector3i c = c0 + Eigen::Vector3i(x, y, z);
          if (!inBounds(c) || !cells_[linearIndex(c)]) continue;
          best = std::min(best, (cellCenter(c) - p).norm());
        }
  }
  return std::min(best, cap);
}

std::vector<Eigen::Vector3i> OccupancyGrid::occupiedCells() const {
  std::vector<Eigen::Vector3i> out;
  for (int z = 0; z < dims_(2); ++z)
    for (int y = 0; y < dims_(1); ++y)
      for (int x = 0; x < dims_(0); ++x) {
        if (cells_[linearIndex({x, y, z})]) out.push_back({x, y, z});
      }
  return out;
}

bool WindZone::contains(const Vec3& p) const {
  return (p.array() >= min_corner_m.array()).all() && (p.array() < max_corner_m.array()).all();
}

void Scenario::validate() const {
  if (grid.cellCount() == 0) throw ScenarioError("scenario grid is empty");
  if (!start.allFinite()) throw ScenarioError("start state has non-finite components");
  if (!grid.inBounds(grid.cellIndex(start.p))) {
    throw ScenarioError("start position lies outside the grid bounds");
  }
  if (grid.isOccupied(start.p)) throw ScenarioError("start position is inside an occupied cell");
  if (!grid.inBounds(grid.cellIndex(goal))) {
    throw ScenarioError("goal position lies outside the grid bounds");
  }
  if (grid.isOccupied(goal)) throw ScenarioError("goal position is inside an occupied cell");
  for (const auto& z : wind_zones) {
    if (!(z.min_corner_m.array() < z.max_corner_m.array()).all()) {
      throw ScenarioError("wind zone min_corner must be componentwise below max_corner");
    }
  }
  const PlannerParams& p = params;
  if (p.mass_kg <= 0 || p.gravity_mps2 <= 0 || p.body_radius_m <= 0 || p.body_height_m <= 0 ||
      p.ts_s <= 0 || p.v_max_mps <= 0) {
    throw ScenarioError("physical parameters must be positive");
  }
  if (p.horizon < 2) throw ScenarioError("horizon must be at least 2");
  if (p.w_pos.minCoeff() < 0 || p.w_yaw < 0 || p.w_input.minCoeff() < 0 ||
      p.w_input_rate.minCoeff() < 0 || p.w_pos_terminal.minCoeff() < 0 ||
      p.w_vel_terminal.minCoeff() < 0 || p.w_yaw_terminal < 0) {
    throw ScenarioError("cost weights must be nonnegative");
  }
  if (p.force_noise_bound_mps2 < 0) throw ScenarioError("force_noise_bound_mps2 must be >= 0");
}

OccupancyGrid generateGrid(const MapSpec& spec, std::uint64_t seed) {
  const Eigen::Vector3i dims =
      (spec.size_m / spec.resolution_m).array().round().cast<int>().max(1);
  OccupancyGrid grid(spec.origin_m, spec.resolution_m, dims);
  std::mt19937_64 rng(seed);

  auto occupy_wall_with_gap = [&](double wall_x, double gap_center) {
    const Vec3 lo = grid.minCorner();
    const Vec3 hi = grid.maxCorner();
    const double g0 = gap_center - 0.5 * spec.gap_width_m;
    const double g1 = gap_center + 0.5 * spec.gap_width_m;
    grid.occupyBox(Vec3(wall_x, lo(1), lo(2)), Vec3(wall_x + spec.wall_thickness_m, g0, hi(2)));
    grid.occupyBox(Vec3(wall_x, g1, lo(2)), Vec3(wall_x + spec.wall_thickness_m, hi(1), hi(2)));
  };

  if (spec.generator == "empty") {
    // nothing to occupy
  } else if (spec.generator == "wall_gap" || spec.generator == "gates") {
    for (const double gx : spec.gate_x_m) {
      const double mid = spec.origin_m(1) + 0.5 * spec.size_m(1);
      const double jitter =
          spec.gap_jitter_m > 0 ? uniform(rng, -spec.gap_jitter_m, spec.gap_jitter_m) : 0.0;
      occupy_wall_with_gap(gx, mid + jitter);
    }
  } else if (spec.generator == "pillars") {
    const Vec3 lo = grid.minCorner();
    const Vec3 hi = grid.maxCorner();
    int placed = 0, attempts = 0;
    while (placed < spec.pillar_count && attempts < 50 * std::max(1, spec.pillar_count)) {
      ++attempts;
      const double x = uniform(rng, lo(0) + 0.5, hi(0) - 0.5);
      const double y = uniform(rng, lo(1) + 0.5, hi(1) - 0.5);
      bool blocked = false;
      for (const auto& [c, r] : spec.keep_clear) {
        if ((Vec3(x, y, c(2)) - c).head<2>().norm() < r + spec.pillar_radius_m) blocked = true;
      }
      if (blocked) continue;
      grid.occupyBox(Vec3(x - spec.pillar_radius_m, y - spec.pillar_radius_m, lo(2)),
                     Vec3(x + spec.pillar_radius_m, y + spec.pillar_radius_m, hi(2)));
      ++placed;
    }
  } else {
    throw ScenarioError("unknown map generator '" + spec.generator + "'");
  }

  if (spec.side_walls) {
    const Vec3 lo = grid.minCorner();
    const Vec3 hi = grid.maxCorner();
    grid.occupyBox(lo, Vec3(hi(0), lo(1) + spec.wall_thickness_m, hi(2)));
    grid.occupyBox(Vec3(lo(0), hi(1) - spec.wall_thickness_m, lo(2)), hi);
  }
  return grid;
}

Scenario scenarioFromJsonText(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(std::string("scenario parse error: ") + e.what());
  }
  try {
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1) {
      throw ScenarioError("scenario file must declare schema_version 1");
    }
    Scenario s;
    maybe(j, "name", s.name);
    maybe(j, "seed", s.seed);
    if (j.contains("params")) s.params = paramsFromJson(j.at("params"));

    if (!j.contains("map")) throw ScenarioError("scenario is missing the 'map' block");
    const json& map = j.at("map");
    if (map.contains("inline")) {
      const json& in = map.at("inline");
      const Vec3 origin = toVec3(in.at("origin_m"), "map.inline.origin_m");
      const double res = in.at("resolution_m").get<double>();
      const auto dims_arr = in.at("dims").get<std::vector<int>>();
      if (dims_arr.size() != 3) throw ScenarioError("map.inline.dims must have 3 entries");
      OccupancyGrid grid(origin, res, Eigen::Vector3i(dims_arr[0], dims_arr[1], dims_arr[2]));
      if (in.contains("cells_rle")) {
        for (const auto& run : in.at("cells_rle")) {
          const std::size_t begin = run.at(0).get<std::size_t>();
          const std::size_t count = run.at(1).get<std::size_t>();
          if (begin + count > grid.cellCount()) {
            throw ScenarioError("map.inline.cells_rle run exceeds the cell count");
          }
          for (std::size_t i = 0; i < count; ++i) {
            const std::size_t lin = begin + i;
            const int x = static_cast<int>(lin % dims_arr[0]);
            const int y = static_cast<int>((lin / dims_arr[0]) % dims_arr[1]);
            const int z = static_cast<int>(lin / (static_cast<std::size_t>(dims_arr[0]) *
                                                  dims_arr[1]));
            grid.setOccupied({x, y, z});
          }
        }
      }
      s.grid = std::move(grid);
    } else {
      s.map_spec = mapSpecFromJson(map);
      s.has_map_spec = true;
      s.grid = generateGrid(s.map_spec, s.seed);
    }

    if (!j.contains("start")) throw ScenarioError("scenario is missing the 'start' block");
    const json& st = j.at("start");
    s.start.p = toVec3(st.at("position_m"), "start.position_m");
    if (st.contains("velocity_mps")) s.start.v = toVec3(st.at("velocity_mps"), "start.velocity_mps");
    maybe(st, "yaw_rad", s.start.yaw);

    if (!j.contains("goal_m")) throw ScenarioError("scenario is missing 'goal_m'");
    s.goal = toVec3(j.at("goal_m"), "goal_m");

    if (j.contains("wind_zones")) {
      for (const auto& wz : j.at("wind_zones")) {
        WindZone z;
        z.min_corner_m = toVec3(wz.at("min_corner_m"), "wind_zones.min_corner_m");
        z.max_corner_m = toVec3(wz.at("max_corner_m"), "wind_zones.max_corner_m");
        z.accel_mps2 = toVec3(wz.at("accel_mps2"), "wind_zones.accel_mps2");
        s.wind_zones.push_back(z);
      }
    }
    if (j.contains("reveal")) {
      for (const auto& rv : j.at("reveal")) {
        RevealEvent e;
        e.time_s = rv.at("time_s").get<double>();
        e.min_corner_m = toVec3(rv.at("min_corner_m"), "reveal.min_corner_m");
        e.max_corner_m = toVec3(rv.at("max_corner_m"), "reveal.max_corner_m");
        s.reveal.push_back(e);
      }
    }

    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("scenario field error: ") + e.what());
  }
}

Scenario loadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenarioFromJsonText(buf.str());
}

std::string scenarioToJsonText(const Scenario& s) {
  json j;
  j["schema_version"] = 1;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["start"] = {{"position_m", fromVec3(s.start.p)},
                {"velocity_mps", fromVec3(s.start.v)},
                {"yaw_rad", s.start.yaw}};
  j["goal_m"] = fromVec3(s.goal);
  if (!s.wind_zones.empty()) {
    json zones = json::array();
    for (const auto& z : s.wind_zones) {
      zones.push_back({{"min_corner_m", fromVec3(z.min_corner_m)},
                       {"max_corner_m", fromVec3(z.max_corner_m)},
                       {"accel_mps2", fromVec3(z.accel_mps2)}});
    }
    j["wind_zones"] = zones;
  }
  if (!s.reveal.empty()) {
    json evs = json::array();
    for (const auto& e : s.reveal) {
      evs.push_back({{"time_s", e.time_s},
                     {"min_corner_m", fromVec3(e.min_corner_m)},
                     {"max_corner_m", fromVec3(e.max_corner_m)}});
    }
    j["reveal"] = evs;
  }

  if (s.has_map_spec) {
    j["map"] = mapSpecToJson(s.map_spec);
  } else {
    json in;
    in["origin_m"] = fromVec3(s.grid.origin());
    in["resolution_m"] = s.grid.resolution();
    in["dims"] = {s.grid.dims()(0), s.grid.dims()(1), s.grid.dims()(2)};
    json runs = json::array();
    const auto& cells = s.grid.rawCells();
    std::size_t i = 0;
    while (i < cells.size()) {
      if (!cells[i]) {
        ++i;
        continue;
      }
      std::size_t begin = i;
      while (i < cells.size() && cells[i]) ++i;
      runs.push_back(json::array({begin, i - begin}));
    }
    in["cells_rle"] = runs;
    j["map"] = {{"inline", in}};
  }
  j["params"] = paramsToJson(s.params);
  return j.dump(2) + "\n";
}

void saveScenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write scenario file '" + path + "'");
  out << scenarioToJsonText(s);
}

}  // namespace resilient
