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

#ifndef RESILIENT_CORRIDOR_HPP
#define RESILIENT_CORRIDOR_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "resilient/params.hpp"
#include "resilient/world.hpp"

namespace resilient {

struct CorridorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Halfspace {
  Vec3 normal = Vec3::UnitX();  // unit length, so offsets are in meters
  double offset = 0.0;          // normal . p <= offset
};

/// Convex free-space region as halfspace rows. The current generator emits
/// axis-aligned boxes (6 rows); the solver only relies on the rows.
struct Polytope {
  std::vector<Halfspace> rows;

  bool contains(const Vec3& p, double margin = 0.0) const;
};

/// Ordered cover of the reference window plus the per-stage region choice.
struct Corridor {
  std::vector<Polytope> polytopes;
  std::vector<int> stage_assignment;  // length N+1, indices into polytopes

  const Polytope& stagePolytope(int k) const { return polytopes[stage_assignment[k]]; }
};

/// Grows an axis-aligned box from a free seed cell, one face slab at a time,
/// until each face hits an obstacle, the map bound, or half of max_extent
/// from the seed (so an unobstructed box is a max_extent-wide cube).
/// Throws CorridorError when the seed is occupied.
Polytope growBox(const OccupancyGrid& grid, const Vec3& seed, double max_extent);

/// Greedy cover of the waypoints: grow a box at the first uncovered
/// waypoint, skip the waypoints it contains, repeat; bridge boxes are
/// inserted when consecutive boxes fail to overlap. Stage k is assigned the
/// first polytope containing waypoint k, never jumping backwards.
Corridor buildCorridor(const OccupancyGrid& grid, const std::vector<Vec3>& waypoints,
                       const PlannerParams& params);

/// Halfspace rows as CSV (polytope index, normal, offset) for plotting.
void writeCorridorCsv(const Corridor& corridor, const std::string& path);

}  // namespace resilient

#endif  // RESILIENT_CORRIDOR_HPP
