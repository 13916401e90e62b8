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

#ifndef RESILIENT_FRONTEND_HPP
#define RESILIENT_FRONTEND_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "resilient/dynamics.hpp"
#include "resilient/params.hpp"
#include "resilient/world.hpp"

namespace resilient {

struct SearchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Vec6 = Eigen::Matrix<double, 6, 1>;  // (position, velocity)

/// One constant-acceleration lattice segment. The force term is the
/// mass-normalized nominal external force baked into the expansion, so the
/// closed form is p(t) = p0 + v0 t + 0.5 (r + force_accel) t^2.
struct PathSegment {
  Vec6 start = Vec6::Zero();
  Vec3 accel_cmd = Vec3::Zero();    // r, the control
  Vec3 force_accel = Vec3::Zero();  // b_ext / m
  double duration_s = 0.0;

  Vec3 positionAt(double t) const;
  Vec3 velocityAt(double t) const;
  Vec6 endState() const;
};

/// Time-parameterized piecewise-polynomial reference. Sampling clamps to
/// the endpoints: before t0 it returns the start, past the end it returns
/// the final position at rest.
struct ReferencePath {
  std::vector<PathSegment> segments;
  double t0 = 0.0;
  double initial_yaw = 0.0;   // yaw fallback until the reference starts moving
  Vec6 rest_state = Vec6::Zero();  // the path when there are no segments (already at goal)

  double duration() const;
  double endTime() const { return t0 + duration(); }
  Vec3 positionAt(double t) const;
  Vec3 velocityAt(double t) const;
  Vec6 endState() const;
  double cost(double time_weight) const;  // sum ||r||^2 tau + rho tau
};

/// Horizon-sampled reference: N+1 positions and unwrapped yaw values.
struct ReferenceWindow {
  std::vector<Vec3> positions;
  std::vector<double> yaws;
  bool beyond_horizon = false;
};

/// Candidate child of a lattice expansion.
struct Primitive {
  Vec6 end = Vec6::Zero();
  Vec3 accel_cmd = Vec3::Zero();
  double duration_s = 0.0;
};

/// Expands the 27 per-axis acceleration combinations over every configured
/// duration, discarding children that break the velocity bound or collide
/// in the (body-inflated) grid. Points within escape_bubble_m of
/// bubble_center are exempt from the collision check, which lets a replan
/// that starts marginally inside the inflation ring escape it.
std::vector<Primitive> expandPrimitives(const Vec6& s, const Vec3& b_ext_n,
                                        const OccupancyGrid& inflated_grid,
                                        const PlannerParams& params,
                                        const Vec3& bubble_center = Vec3::Zero(),
                                        double escape_bubble_m = 0.0);

/// Closed-form optimal cost of the unconstrained force-free double
/// integrator from (position, velocity) to (goal, rest):
/// min_T  integral ||r||^2 dt + rho T, with the inner problem solved
/// analytically and the outer one by scalar search. Never negative.
double searchHeuristic(const Vec6& s, const Vec3& goal, const PlannerParams& params);

/// Kinodynamic lattice A* over the force-biased double integrator.
/// Returns a collision-free, velocity-bounded, C1 path from the start
/// position/velocity to the goal tolerance ball at rest. Throws SearchError
/// when the start or goal is blocked or the node budget runs out.
ReferencePath searchPath(const OccupancyGrid& grid, const QuadState& start, const Vec3& goal,
                         const Vec3& b_ext_n, const PlannerParams& params);

/// Samples the window of N+1 reference positions and yaw values starting at
/// t_now (clamped into the path's time support). Yaw follows the reference
/// velocity direction above the dead-band, holds otherwise, and is unwrapped
/// so consecutive values never jump by 2 pi.
ReferenceWindow sampleWindow(const ReferencePath& path, double t_now,
                             const PlannerParams& params);

/// Reference dump at a fixed sampling period, as CSV (t, position, velocity).
void writePathCsv(const ReferencePath& path, const std::string& csv_path, double dt = 0.01);

}  // namespace resilient

#endif  // RESILIENT_FRONTEND_HPP
