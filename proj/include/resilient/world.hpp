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

#ifndef RESILIENT_WORLD_HPP
#define RESILIENT_WORLD_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "resilient/dynamics.hpp"
#include "resilient/params.hpp"

namespace resilient {

/// Thrown on scenario parse or validation failures; the message names the
/// offending field or invariant.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Static boolean occupancy grid. Cell indexing is floor((p - origin)/res);
/// points on an upper cell boundary therefore belong to the next cell, and
/// anything outside the grid is treated as occupied.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(const Vec3& origin, double resolution, const Eigen::Vector3i& dims);

  const Vec3& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  const Eigen::Vector3i& dims() const { return dims_; }
  std::size_t cellCount() const { return cells_.size(); }

  Eigen::Vector3i cellIndex(const Vec3& p) const;
  bool inBounds(const Eigen::Vector3i& c) const;
  Vec3 cellCenter(const Eigen::Vector3i& c) const;
  std::size_t linearIndex(const Eigen::Vector3i& c) const;

  bool isOccupied(const Vec3& p) const;
  bool isOccupiedCell(const Eigen::Vector3i& c) const;  // out of bounds counts occupied
  void setOccupied(const Eigen::Vector3i& c, bool occupied = true);
  void occupyBox(const Vec3& min_corner, const Vec3& max_corner);

  /// World-space bounds of the mapped volume.
  Vec3 minCorner() const { return origin_; }
  Vec3 maxCorner() const { return origin_ + resolution_ * dims_.cast<double>(); }

  /// True iff no sample at spacing <= step along [a, b] (endpoints included)
  /// hits an occupied cell.
  bool segmentFree(const Vec3& a, const Vec3& b, double step) const;

  /// Conservative dilation: a cell becomes occupied when any occupied cell
  /// center lies within `radius` of its center.
  OccupancyGrid inflate(double radius) const;

  /// Distance from p to the nearest occupied cell center, capped. Searches
  /// expanding cell shells, so it is cheap near obstacles.
  double clearance(const Vec3& p, double cap) const;

  std::vector<Eigen::Vector3i> occupiedCells() const;
  const std::vector<std::uint8_t>& rawCells() const { return cells_; }
  bool anyOccupied() const { return any_occupied_; }

 private:
  Vec3 origin_ = Vec3::Zero();
  double resolution_ = 0.1;
  Eigen::Vector3i dims_ = Eigen::Vector3i::Zero();
  std::vector<std::uint8_t> cells_;
  bool any_occupied_ = false;
};

/// Axis-aligned box applying a constant mass-normalized force to anything
/// inside it. Overlapping zones add up.
struct WindZone {
  Vec3 min_corner_m = Vec3::Zero();
  Vec3 max_corner_m = Vec3::Zero();
  Vec3 accel_mps2 = Vec3::Zero();

  bool contains(const Vec3& p) const;
};

/// A box of cells that becomes occupied at a fixed mission time, emulating
/// a limited field of view revealing an obstacle mid-flight.
struct RevealEvent {
  double time_s = 0.0;
  Vec3 min_corner_m = Vec3::Zero();
  Vec3 max_corner_m = Vec3::Zero();
};

/// Procedural map generators, keyed by name. All randomness comes from the
/// seed, so grids are reproducible.
struct MapSpec {
  std::string generator = "empty";  // empty | wall_gap | gates | pillars
  Vec3 origin_m = Vec3::Zero();
  Vec3 size_m = Vec3(10, 10, 3);
  double resolution_m = 0.1;
  bool side_walls = false;         // occupy the y extremes
  // wall_gap / gates
  std::vector<double> gate_x_m;    // x position of each wall
  double gap_width_m = 1.2;
  double gap_jitter_m = 0.0;       // uniform jitter of the gap center, from the seed
  double wall_thickness_m = 0.2;
  // pillars
  int pillar_count = 0;
  double pillar_radius_m = 0.15;
  // xy-circles pillars must not intrude on (start/goal neighborhoods)
  std::vector<std::pair<Vec3, double>> keep_clear;
};

OccupancyGrid generateGrid(const MapSpec& spec, std::uint64_t seed);

struct Scenario {
  std::string name = "scenario";
  OccupancyGrid grid;
  QuadState start;
  Vec3 goal = Vec3::Zero();
  std::vector<WindZone> wind_zones;
  std::vector<RevealEvent> reveal;
  PlannerParams params;
  std::uint64_t seed = 0;
  MapSpec map_spec;           // retained when the grid came from a generator,
  bool has_map_spec = false;  // so benchmarks can re-jitter it per seed

  /// Checks every scenario invariant; throws ScenarioError naming the first
  /// violated one.
  void validate() const;
};

/// Loads and validates a scenario file (schema documented in the README).
Scenario loadScenario(const std::string& path);
Scenario scenarioFromJsonText(const std::string& text);

/// Serializes a scenario so that load(save(s)) reproduces every value.
/// Generator-built grids are saved in inline run-length-encoded form.
void saveScenario(const Scenario& s, const std::string& path);
std::string scenarioToJsonText(const Scenario& s);

}  // namespace resilient

#endif  // RESILIENT_WORLD_HPP
