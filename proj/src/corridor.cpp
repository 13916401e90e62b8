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

#include "resilient/corridor.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace resilient {

namespace {

struct CellBox {
  Eigen::Vector3i lo;
  Eigen::Vector3i hi;  // inclusive
};

struct WorldBox {
  Vec3 lo;
  Vec3 hi;
};

WorldBox toWorld(const OccupancyGrid& grid, const CellBox& box) {
  return {grid.origin() + grid.resolution() * box.lo.cast<double>(),
          grid.origin() + grid.resolution() * (box.hi + Eigen::Vector3i::Ones()).cast<double>()};
}

// All cells of the one-cell-thick slab just outside face `axis`/`sign` are
// in bounds and free.
bool slabFree(const OccupancyGrid& grid, const CellBox& box, int axis, int sign) {
  Eigen::Vector3i lo = box.lo;
  Eigen::Vector3i hi = box.hi;
  if (sign > 0) {
    lo(axis) = hi(axis) = box.hi(axis) + 1;
  } else {
    lo(axis) = hi(axis) = box.lo(axis) - 1;
  }
  for (int z = lo(2); z <= hi(2); ++z)
    for (int y = lo(1); y <= hi(1); ++y)
      for (int x = lo(0); x <= hi(0); ++x) {
        if (grid.isOccupiedCell({x, y, z})) return false;
      }
  return true;
}

WorldBox growWorldBox(const OccupancyGrid& grid, const Vec3& seed, double max_extent) {
  if (grid.isOccupied(seed)) {
    std::ostringstream msg;
    msg << "growBox: seed (" << seed.transpose() << ") is occupied";
    throw CorridorError(msg.str());
  }
  const double half = 0.5 * max_extent;
  CellBox box{grid.cellIndex(seed), grid.cellIndex(seed)};
  std::array<bool, 6> stuck{};
  bool progress = true;
  while (progress) {
    progress = false;
    for (int face = 0; face < 6; ++face) {
      if (stuck[face]) continue;
      const int axis = face / 2;
      const int sign = (face % 2 == 0) ? 1 : -1;
      // Distance from the seed to the face plane after growing by one cell.
      const WorldBox wb = toWorld(grid, box);
      const double dist = sign > 0 ? wb.hi(axis) + grid.resolution() - seed(axis)
                                   : seed(axis) - (wb.lo(axis) - grid.resolution());
      if (dist > half + 1e-12 || !slabFree(grid, box, axis, sign)) {
        stuck[face] = true;
        continue;
      }
      if (sign > 0) {
        ++box.hi(axis);
      } else {
        --box.lo(axis);
      }
      progress = true;
    }
  }
  return toWorld(grid, box);
}

Polytope boxPolytope(const WorldBox& box) {
  Polytope poly;
  for (int axis = 0; axis < 3; ++axis) {
    Halfspace upper, lower;
    upper.normal = Vec3::Unit(axis);
    upper.offset = box.hi(axis);
    lower.normal = -Vec3::Unit(axis);
    lower.offset = -box.lo(axis);
    poly.rows.push_back(upper);
    poly.rows.push_back(lower);
  }
  return poly;
}

bool overlaps(const WorldBox& a, const WorldBox& b) {
  for (int axis = 0; axis < 3; ++axis) {
    if (std::min(a.hi(axis), b.hi(axis)) - std::max(a.lo(axis), b.lo(axis)) <= 1e-9) {
      return false;
    }
  }
  return true;
}

bool inBox(const WorldBox& box, const Vec3& p) {
  return (p.array() >= box.lo.array()).all() && (p.array() <= box.hi.array()).all();
}

}  // namespace

bool Polytope::contains(const Vec3& p, double margin) const {
  for (const auto& row : rows) {
    if (row.normal.dot(p) > row.offset - margin) return false;
  }
  return true;
}

Polytope growBox(const OccupancyGrid& grid, const Vec3& seed, double max_extent) {
  return boxPolytope(growWorldBox(grid, seed, max_extent));
}

Corridor buildCorridor(const OccupancyGrid& grid, const std::vector<Vec3>& waypoints,
                       const PlannerParams& params) {
  if (waypoints.empty()) throw CorridorError("buildCorridor: no waypoints");
  for (std::size_t k = 0; k < waypoints.size(); ++k) {
    if (grid.isOccupied(waypoints[k])) {
      std::ostringstream msg;
      msg << "buildCorridor: waypoint " << k << " lies in occupied space";
      throw CorridorError(msg.str());
    }
  }

  std::vector<WorldBox> boxes;
  for (std::size_t k = 0; k < waypoints.size(); ++k) {
    bool covered = false;
    for (const auto& box : boxes) {
      if (inBox(box, waypoints[k])) {
        covered = true;
        break;
      }
    }
    if (covered) continue;
    if (static_cast<int>(boxes.size()) >= params.corridor_box_budget) {
      throw CorridorError("buildCorridor: box budget exhausted before covering the window");
    }
    WorldBox next = growWorldBox(grid, waypoints[k], params.box_max_extent_m);
    if (!boxes.empty() && !overlaps(boxes.back(), next)) {
      // Bridge through the midpoint of the gap between the previous waypoint
      // and this one; both lie in free space on a feasible reference.
      const Vec3 mid = 0.5 * (waypoints[k - 1] + waypoints[k]);
      WorldBox bridge = growWorldBox(grid, mid, params.box_max_extent_m);
      if (!overlaps(boxes.back(), bridge) || !overlaps(bridge, next)) {
        throw CorridorError("buildCorridor: failed to bridge consecutive boxes");
      }
      boxes.push_back(bridge);
    }
    boxes.push_back(next);
  }

  Corridor corridor;
  corridor.polytopes.reserve(boxes.size());
  for (const auto& box : boxes) corridor.polytopes.push_back(boxPolytope(box));

  corridor.stage_assignment.resize(waypoints.size());
  int current = 0;
  for (std::size_t k = 0; k < waypoints.size(); ++k) {
    int chosen = -1;
    for (int j = current; j < static_cast<int>(boxes.size()); ++j) {
      if (inBox(boxes[j], waypoints[k])) {
        chosen = j;
        break;
      }
    }
    if (chosen < 0) {
      std::ostringstream msg;
      msg << "buildCorridor: waypoint " << k << " not covered by any forward polytope";
      throw CorridorError(msg.str());
    }
    corridor.stage_assignment[k] = chosen;
    current = chosen;
  }
  return corridor;
}

void writeCorridorCsv(const Corridor& corridor, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CorridorError("writeCorridorCsv: cannot open '" + path + "'");
  out << "polytope,normal_x,normal_y,normal_z,offset\n";
  char line[160];
  for (std::size_t i = 0; i < corridor.polytopes.size(); ++i) {
    for (const auto& row : corridor.polytopes[i].rows) {
      std::snprintf(line, sizeof(line), "%zu,%.9g,%.9g,%.9g,%.9g\n", i, row.normal(0),
                    row.normal(1), row.normal(2), row.offset);
      out << line;
    }
  }
}

}  // namespace resilient
