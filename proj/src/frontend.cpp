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

#include "resilient/frontend.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>
#include <unordered_map>

namespace resilient {

namespace {

Vec3 sampleSegmentPosition(const Vec6& s, const Vec3& total_accel, double t) {
  return s.head<3>() + s.tail<3>() * t + 0.5 * total_accel * t * t;
}

// Collision check along one primitive, sampled finely enough that
// consecutive samples are less than one cell apart at the velocity bound.
bool primitiveFree(const Vec6& s, const Vec3& total_accel, double tau,
                   const OccupancyGrid& grid, const PlannerParams& params,
                   const Vec3& bubble_center, double bubble_r) {
  if (!grid.anyOccupied()) return true;
  const double vmax_euclid = std::sqrt(3.0) * params.v_max_mps;
  const double dt = grid.resolution() / std::max(vmax_euclid, 0.1);
  const int n = std::max(1, static_cast<int>(std::ceil(tau / dt)));
  for (int i = 0; i <= n; ++i) {
    const double t = tau * i / n;
    const Vec3 p = sampleSegmentPosition(s, total_accel, t);
    if (!grid.isOccupied(p)) continue;
    if (bubble_r > 0.0 && (p - bubble_center).norm() <= bubble_r) continue;
    return false;
  }
  return true;
}

// Per-axis minimum-effort double integrator cost for fixed duration.
double obvpCost(const Vec6& s, const Vec3& goal, double T) {
  double total = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    const double dv = -s(3 + axis);
    const double dp = goal(axis) - s(axis) - s(3 + axis) * T;
    const double a = (6.0 * dp - 2.0 * dv * T) / (T * T);
    const double b = (6.0 * dv * T - 12.0 * dp) / (T * T * T);
    total += a * a * T + a * b * T * T + b * b * T * T * T / 3.0;
  }
  return total;
}

struct VoxelKey {
  std::array<int, 6> v;
  bool operator==(const VoxelKey& o) const { return v == o.v; }
  bool operator<(const VoxelKey& o) const { return v < o.v; }
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    std::size_t h = 1469598103934665603ull;
    for (int x : k.v) {
      h ^= static_cast<std::size_t>(static_cast<unsigned int>(x));
      h *= 1099511628211ull;
    }
    return h;
  }
};

VoxelKey voxelOf(const Vec6& s, const PlannerParams& params) {
  VoxelKey k;
  for (int i = 0; i < 3; ++i) {
    k.v[i] = static_cast<int>(std::floor(s(i) / params.search_pos_voxel_m));
    k.v[3 + i] = static_cast<int>(std::floor(s(3 + i) / params.search_vel_voxel_mps));
  }
  return k;
}

struct Node {
  Vec6 s;
  int parent = -1;
  Vec3 accel_cmd = Vec3::Zero();
  double tau = 0.0;
  double g = 0.0;
};

struct OpenEntry {
  double f;
  double g;
  VoxelKey key;
  int index;
  // Total order: lowest f, then lowest g, then lexicographic voxel, then
  // insertion order; makes the search fully deterministic.
  bool operator>(const OpenEntry& o) const {
    if (f != o.f) return f > o.f;
    if (g != o.g) return g > o.g;
    if (!(key == o.key)) return o.key < key;
    return index > o.index;
  }
};

}  // namespace

Vec3 PathSegment::positionAt(double t) const {
  return sampleSegmentPosition(start, accel_cmd + force_accel, t);
}

Vec3 PathSegment::velocityAt(double t) const {
  return start.tail<3>() + (accel_cmd + force_accel) * t;
}

Vec6 PathSegment::endState() const {
  Vec6 e;
  e.head<3>() = positionAt(duration_s);
  e.tail<3>() = velocityAt(duration_s);
  return e;
}

double ReferencePath::duration() const {
  double d = 0.0;
  for (const auto& seg : segments) d += seg.duration_s;
  return d;
}

Vec3 ReferencePath::positionAt(double t) const {
  if (segments.empty()) return endState().head<3>();
  double rel = t - t0;
  if (rel <= 0.0) return segments.front().start.head<3>();
  for (const auto& seg : segments) {
    if (rel <= seg.duration_s) return seg.positionAt(rel);
    rel -= seg.duration_s;
  }
  return segments.back().endState().head<3>();
}

Vec3 ReferencePath::velocityAt(double t) const {
  if (segments.empty()) return Vec3::Zero();
  double rel = t - t0;
  if (rel <= 0.0) return segments.front().start.tail<3>();
  for (const auto& seg : segments) {
    if (rel <= seg.duration_s) return seg.velocityAt(rel);
    rel -= seg.duration_s;
  }
  return Vec3::Zero();  // the reference rests at its endpoint
}

Vec6 ReferencePath::endState() const {
  if (segments.empty()) return rest_state;
  return segments.back().endState();
}

double ReferencePath::cost(double time_weight) const {
  double c = 0.0;
  for (const auto& seg : segments) {
    c += seg.accel_cmd.squaredNorm() * seg.duration_s + time_weight * seg.duration_s;
  }
  return c;
}

std::vector<Primitive> expandPrimitives(const Vec6& s, const Vec3& b_ext_n,
                                        const OccupancyGrid& inflated_grid,
                                        const PlannerParams& params, const Vec3& bubble_center,
                                        double escape_bubble_m) {
  std::vector<Primitive> out;
  out.reserve(27 * params.search_durations_s.size());
  const Vec3 force_accel = b_ext_n / params.mass_kg;
  const double a = params.search_accel_max_mps2;
  const std::array<double, 3> axis_vals{-a, 0.0, a};
  // The lattice is laid over the total acceleration r + b/m, so the
  // expansion geometry is independent of the nominal force while the cost
  // (on the control r alone) pays for fighting it. With the lattice on r
  // instead, a force of magnitude a_max would make rest unreachable.
  for (double tau : params.search_durations_s) {
    for (double ax : axis_vals) {
      for (double ay : axis_vals) {
        for (double az : axis_vals) {
          const Vec3 total(ax, ay, az);
          const Vec3 v_end = s.tail<3>() + total * tau;
          if (v_end.cwiseAbs().maxCoeff() > params.v_max_mps) continue;
          if (!primitiveFree(s, total, tau, inflated_grid, params, bubble_center,
                             escape_bubble_m)) {
            continue;
          }
          Primitive prim;
          prim.end.head<3>() = sampleSegmentPosition(s, total, tau);
          prim.end.tail<3>() = v_end;
          prim.accel_cmd = total - force_accel;
          prim.duration_s = tau;
          out.push_back(prim);
        }
      }
    }
  }
  return out;
}

double searchHeuristic(const Vec6& s, const Vec3& goal, const PlannerParams& params) {
  const double dist = (goal - s.head<3>()).norm();
  const double speed = s.tail<3>().norm();
  if (dist < 1e-9 && speed < 1e-9) return 0.0;

  const double t_hi = 2.0 * (3.0 * dist / params.v_max_mps +
                             3.0 * speed / std::max(params.search_accel_max_mps2, 0.1) + 1.0);
  const double t_lo = 1e-3;
  auto total = [&](double T) { return obvpCost(s, goal, T) + params.search_time_weight * T; };

  // Coarse log-spaced scan, then golden-section refinement of the best cell.
  const int n = 24;
  const double ratio = std::pow(t_hi / t_lo, 1.0 / n);
  double best_t = t_lo;
  double best = total(t_lo);
  double T = t_lo;
  for (int i = 1; i <= n; ++i) {
    T *= ratio;
    const double c = total(T);
    if (c < best) {
      best = c;
      best_t = T;
    }
  }
  double lo = best_t / ratio;
  double hi = best_t * ratio;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = total(x1), f2 = total(x2);
  for (int it = 0; it < 28; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = total(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = total(x2);
    }
  }
  return std::max(0.0, std::min(best, std::min(f1, f2)));
}

ReferencePath searchPath(const OccupancyGrid& grid, const QuadState& start, const Vec3& goal,
                         const Vec3& b_ext_n, const PlannerParams& params) {
  if (grid.isOccupied(start.p)) throw SearchError("searchPath: start is occupied");
  if (grid.isOccupied(goal)) throw SearchError("searchPath: goal is occupied");
  const OccupancyGrid inflated = grid.inflate(params.body_radius_m);
  if (inflated.isOccupied(goal)) {
    throw SearchError("searchPath: goal has no body clearance");
  }
  const double bubble = params.body_radius_m + 2.0 * grid.resolution();

  Vec6 s0;
  s0.head<3>() = start.p;
  s0.tail<3>() = start.v.cwiseMax(-params.v_max_mps).cwiseMin(params.v_max_mps);

  ReferencePath path;
  path.initial_yaw = start.yaw;
  path.rest_state = s0;

  auto at_goal = [&](const Vec6& s) {
    return (s.head<3>() - goal).norm() <= params.goal_pos_tol_m &&
           s.tail<3>().norm() <= params.goal_vel_tol_mps;
  };
  if (at_goal(s0)) return path;  // zero-length path, already there

  std::vector<Node> nodes;
  nodes.push_back({s0, -1, Vec3::Zero(), 0.0, 0.0});
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<OpenEntry>> open;
  std::unordered_map<VoxelKey, double, VoxelKeyHash> best_g;
  const VoxelKey k0 = voxelOf(s0, params);
  best_g[k0] = 0.0;
  open.push({searchHeuristic(s0, goal, params), 0.0, k0, 0});

  int pops = 0;
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    const Node cur = nodes[top.index];  // copy: nodes may reallocate below
    if (top.g > cur.g + 1e-12) continue;  // stale entry

    if (++pops > params.search_node_budget) break;

    if (at_goal(cur.s)) {
      // Reconstruct the segment chain from the start.
      std::vector<int> chain;
      for (int i = top.index; i >= 0; i = nodes[i].parent) chain.push_back(i);
      std::reverse(chain.begin(), chain.end());
      for (std::size_t i = 1; i < chain.size(); ++i) {
        const Node& n = nodes[chain[i]];
        PathSegment seg;
        seg.start = nodes[chain[i - 1]].s;
        seg.accel_cmd = n.accel_cmd;
        seg.force_accel = b_ext_n / params.mass_kg;
        seg.duration_s = n.tau;
        path.segments.push_back(seg);
      }
      return path;
    }

    for (const Primitive& prim :
         expandPrimitives(cur.s, b_ext_n, inflated, params, start.p, bubble)) {
      const double g_child =
          cur.g + prim.accel_cmd.squaredNorm() * prim.duration_s +
          params.search_time_weight * prim.duration_s;
      const VoxelKey key = voxelOf(prim.end, params);
      auto it = best_g.find(key);
      if (it != best_g.end() && it->second <= g_child + 1e-12) continue;
      best_g[key] = g_child;
      nodes.push_back({prim.end, top.index, prim.accel_cmd, prim.duration_s, g_child});
      open.push({g_child + searchHeuristic(prim.end, goal, params), g_child, key,
                 static_cast<int>(nodes.size()) - 1});
    }
  }
  throw SearchError("searchPath: no path found within the node budget");
}

ReferenceWindow sampleWindow(const ReferencePath& path, double t_now,
                             const PlannerParams& params) {
  ReferenceWindow window;
  const int n = params.horizon;
  window.positions.reserve(n + 1);
  window.yaws.reserve(n + 1);
  const double t_end = path.endTime();
  window.beyond_horizon = t_now + n * params.ts_s > t_end;

  double prev_yaw = path.initial_yaw;
  for (int k = 0; k <= n; ++k) {
    const double t = t_now + k * params.ts_s;
    window.positions.push_back(path.positionAt(t));
    const Vec3 v = path.velocityAt(t);
    double yaw = prev_yaw;
    if (v.head<2>().norm() > params.yaw_deadband_mps) {
      const double raw = std::atan2(v(1), v(0));
      yaw = prev_yaw + wrapAngle(raw - prev_yaw);  // unwrapped continuation
    }
    window.yaws.push_back(yaw);
    prev_yaw = yaw;
  }
  return window;
}

void writePathCsv(const ReferencePath& path, const std::string& csv_path, double dt) {
  std::ofstream out(csv_path);
  if (!out) throw SearchError("writePathCsv: cannot open '" + csv_path + "'");
  out << "t,p_x,p_y,p_z,v_x,v_y,v_z\n";
  char line[200];
  const double t1 = path.endTime();
  for (double t = path.t0; t <= t1 + 1e-9; t += dt) {
    const Vec3 p = path.positionAt(t);
    const Vec3 v = path.velocityAt(t);
    std::snprintf(line, sizeof(line), "%.6f,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", t, p(0), p(1),
                  p(2), v(0), v(1), v(2));
    out << line;
  }
}

}  // namespace resilient
