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

#include <doctest.h>

#include <cstdio>

namespace resilient {
namespace {

OccupancyGrid smallGrid() {
  OccupancyGrid g(Vec3::Zero(), 0.1, Eigen::Vector3i(100, 100, 30));
  return g;
}

std::string minimalScenarioJson() {
  return R"({
    "schema_version": 1,
    "seed": 3,
    "map": {"generator": "empty", "size_m": [10, 10, 3], "resolution_m": 0.1},
    "start": {"position_m": [1.0, 1.0, 1.0]},
    "goal_m": [8.0, 8.0, 1.0]
  })";
}

TEST_CASE("cell indexing uses floor semantics") {
  OccupancyGrid g = smallGrid();
  CHECK(g.cellIndex(Vec3(0.05, 0.05, 0.05)) == Eigen::Vector3i(0, 0, 0));
  CHECK(g.cellIndex(Vec3(0.1, 0.0, 0.0)) == Eigen::Vector3i(1, 0, 0));  // boundary -> next cell
  CHECK(g.cellIndex(Vec3(-0.01, 0.0, 0.0))(0) == -1);
}

TEST_CASE("occupancy queries") {
  OccupancyGrid g = smallGrid();

  SUBCASE("free cell") { CHECK_FALSE(g.isOccupied(Vec3(5, 5, 1))); }
  SUBCASE("out of bounds is occupied") {
    CHECK(g.isOccupied(Vec3(-1, 5, 1)));
    CHECK(g.isOccupied(Vec3(5, 5, 100)));
    CHECK(g.isOccupied(g.maxCorner()));  // upper boundary indexes past the last cell
  }
  SUBCASE("marking and re-querying is deterministic") {
    g.setOccupied({10, 10, 10});
    for (int i = 0; i < 3; ++i) CHECK(g.isOccupied(g.cellCenter({10, 10, 10})));
  }
}

TEST_CASE("segment queries") {
  OccupancyGrid g = smallGrid();

  SUBCASE("degenerate segment in free space") {
    CHECK(g.segmentFree(Vec3(5, 5, 1), Vec3(5, 5, 1), 0.05));
  }
  SUBCASE("empty map segments are free") {
    CHECK(g.segmentFree(Vec3(1, 1, 1), Vec3(9, 9, 2), 0.05));
  }
  SUBCASE("segment through a single occupied cell is blocked") {
    g.occupyBox(Vec3(5.0, 0.0, 0.0), Vec3(5.1, 10.0, 3.0));
    CHECK_FALSE(g.segmentFree(Vec3(1, 5, 1), Vec3(9, 5, 1), 0.05));
  }
  SUBCASE("symmetric in endpoints") {
    g.occupyBox(Vec3(4.7, 4.7, 0.9), Vec3(5.2, 5.2, 1.3));
    const Vec3 a(1, 1, 1), b(9, 9, 1.1);
    CHECK(g.segmentFree(a, b, 0.04) == g.segmentFree(b, a, 0.04));
  }
}

TEST_CASE("inflation is conservative around obstacles") {
  OccupancyGrid g = smallGrid();
  g.setOccupied({50, 50, 15});
  const OccupancyGrid inflated = g.inflate(0.22);
  const Vec3 c = g.cellCenter({50, 50, 15});
  CHECK(inflated.isOccupied(c + Vec3(0.2, 0, 0)));
  CHECK_FALSE(inflated.isOccupied(c + Vec3(0.5, 0, 0)));
  // Inflation only grows the occupied set.
  for (const auto& cell : g.occupiedCells()) CHECK(inflated.isOccupiedCell(cell));
}

TEST_CASE("clearance") {
  OccupancyGrid g = smallGrid();
  SUBCASE("empty map returns the cap") { CHECK(g.clearance(Vec3(5, 5, 1), 2.0) == 2.0); }
  SUBCASE("near an obstacle") {
    g.setOccupied({50, 50, 10});
    const Vec3 c = g.cellCenter({50, 50, 10});
    CHECK(g.clearance(c + Vec3(0.4, 0, 0), 2.0) == doctest::Approx(0.4));
  }
}

TEST_CASE("scenario loading") {
  SUBCASE("minimal empty-map scenario") {
    const Scenario s = scenarioFromJsonText(minimalScenarioJson());
    CHECK(s.wind_zones.empty());
    CHECK(s.grid.cellCount() == 100 * 100 * 30);
    CHECK(s.goal(0) == doctest::Approx(8.0));
  }
  SUBCASE("missing noise bound falls back to the stock default") {
    const Scenario s = scenarioFromJsonText(minimalScenarioJson());
    CHECK(s.params.force_noise_bound_mps2 == doctest::Approx(0.5));
  }
  SUBCASE("start inside an occupied cell fails validation") {
    std::string text = R"({
      "schema_version": 1,
      "map": {"generator": "wall_gap", "size_m": [10, 10, 3], "resolution_m": 0.1,
              "gate_x_m": [5.0], "gap_width_m": 1.0},
      "start": {"position_m": [5.05, 1.0, 1.0]},
      "goal_m": [8.0, 5.0, 1.0]
    })";
    CHECK_THROWS_AS(scenarioFromJsonText(text), ScenarioError);
    CHECK_THROWS_WITH_AS(scenarioFromJsonText(text),
                         doctest::Contains("start position is inside an occupied cell"),
                         ScenarioError);
  }
  SUBCASE("parse errors carry context") {
    CHECK_THROWS_AS(scenarioFromJsonText("{ not json"), ScenarioError);
  }
  SUBCASE("missing schema version is rejected") {
    CHECK_THROWS_AS(scenarioFromJsonText(R"({"map": {}})"), ScenarioError);
  }
}

TEST_CASE("scenario round trip preserves every value") {
  Scenario s = scenarioFromJsonText(minimalScenarioJson());
  s.params.w_pos = Vec3(7, 8, 9);
  s.params.search_durations_s = {0.2, 0.35, 0.6};
  s.wind_zones.push_back({Vec3(2, 2, 0), Vec3(4, 4, 3), Vec3(0, 2, 0)});
  s.reveal.push_back({1.5, Vec3(6, 6, 0), Vec3(7, 7, 3)});
  s.grid.setOccupied({3, 3, 3});
  s.has_map_spec = false;  // force inline serialization of the mutated grid

  const std::string text = scenarioToJsonText(s);
  const Scenario r = scenarioFromJsonText(text);

  CHECK(r.params.w_pos == s.params.w_pos);
  CHECK(r.params.search_durations_s == s.params.search_durations_s);
  CHECK(r.params.force_noise_bound_mps2 == s.params.force_noise_bound_mps2);
  CHECK(r.seed == s.seed);
  CHECK(r.wind_zones.size() == 1);
  CHECK(r.wind_zones[0].accel_mps2 == s.wind_zones[0].accel_mps2);
  CHECK(r.reveal.size() == 1);
  CHECK(r.reveal[0].time_s == s.reveal[0].time_s);
  CHECK(r.grid.rawCells() == s.grid.rawCells());
  CHECK(r.grid.origin() == s.grid.origin());

  // A second serialization is byte-identical.
  CHECK(scenarioToJsonText(r) == text);
}

TEST_CASE("wind zones") {
  WindZone z{Vec3(0, 0, 0), Vec3(1, 1, 1), Vec3(0, 2, 0)};
  CHECK(z.contains(Vec3(0.5, 0.5, 0.5)));
  CHECK_FALSE(z.contains(Vec3(1.5, 0.5, 0.5)));
  CHECK(z.contains(Vec3(0, 0, 0)));        // closed lower face
  CHECK_FALSE(z.contains(Vec3(1, 1, 1)));  // open upper face
}

TEST_CASE("generators are seed-deterministic") {
  MapSpec spec;
  spec.generator = "pillars";
  spec.size_m = Vec3(10, 10, 3);
  spec.pillar_count = 12;
  const OccupancyGrid a = generateGrid(spec, 7);
  const OccupancyGrid b = generateGrid(spec, 7);
  const OccupancyGrid c = generateGrid(spec, 8);
  CHECK(a.rawCells() == b.rawCells());
  CHECK(a.rawCells() != c.rawCells());
}

TEST_CASE("gate generator leaves a traversable gap") {
  MapSpec spec;
  spec.generator = "gates";
  spec.size_m = Vec3(10, 6, 3);
  spec.gate_x_m = {5.0};
  spec.gap_width_m = 1.2;
  spec.gap_jitter_m = 0.8;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const OccupancyGrid g = generateGrid(spec, seed);
    bool gap_found = false;
    for (double y = 0.3; y < 5.7; y += 0.05) {
      if (g.segmentFree(Vec3(4.8, y, 1.5), Vec3(5.4, y, 1.5), 0.05)) gap_found = true;
    }
    CHECK(gap_found);
  }
}

TEST_CASE("file io") {
  const std::string path = "/tmp/resilient_world_test_scenario.json";
  Scenario s = scenarioFromJsonText(minimalScenarioJson());
  saveScenario(s, path);
  const Scenario r = loadScenario(path);
  CHECK(r.goal == s.goal);
  std::remove(path.c_str());
  CHECK_THROWS_AS(loadScenario("/tmp/definitely_missing_scenario.json"), ScenarioError);
}

}  // namespace
}  // namespace resilient
