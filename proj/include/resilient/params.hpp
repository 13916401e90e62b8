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

#ifndef RESILIENT_PARAMS_HPP
#define RESILIENT_PARAMS_HPP

#include <Eigen/Dense>
#include <vector>

namespace resilient {

/// All tunable constants of the planning stack in one value type.
/// Field names carry units. Defaults reproduce the stock flight
/// configuration (0.22 m / 0.13 m body, k_d = 0.33, 50 ms horizon steps).
struct PlannerParams {
  // Vehicle
  double mass_kg = 1.0;
  double gravity_mps2 = 9.81;
  double drag_coeff_ns_per_m = 0.33;  // k_d of the diag{k_d, k_d, 0} body-frame drag model
  double body_radius_m = 0.22;
  double body_height_m = 0.13;

  // Horizon / disturbance model
  double ts_s = 0.05;                      // sampling time of the receding horizon
  int horizon = 20;                        // N
  double force_noise_bound_mps2 = 0.5;     // w_m, inf-norm bound on mass-normalized force noise
  double v_max_mps = 2.0;

  // Input and state boxes
  double rate_max_radps = 3.0;
  double thrust_min_n = 0.0;
  double thrust_max_hover_factor = 2.5;    // T_max = factor * m * g
  double tilt_max_rad = 0.6;

  // Tracking cost weights (diagonals of the quadratic forms)
  Eigen::Vector3d w_pos{100.0, 100.0, 100.0};
  double w_yaw = 10.0;
  Eigen::Vector3d w_pos_terminal{200.0, 200.0, 200.0};
  double w_yaw_terminal = 20.0;
  Eigen::Vector3d w_vel_terminal{10.0, 10.0, 10.0};  // applied only past the reference end
  Eigen::Vector4d w_input{1.0, 1.0, 1.0, 0.1};       // thrust entry penalizes T - m*g
  Eigen::Vector4d w_input_rate{5.0, 5.0, 5.0, 0.2};
  double slack_penalty = 1.0e4;                      // exact L1 weight on corridor slacks

  // Error-feedback LQR weights (gain fixed per mission at the hover point)
  Eigen::Matrix<double, 9, 1> lqr_state_weights =
      (Eigen::Matrix<double, 9, 1>() << 10, 10, 10, 2, 2, 2, 1, 1, 1).finished();
  Eigen::Vector4d lqr_input_weights{1.0, 1.0, 1.0, 0.2};

  // Front-end lattice search
  double search_accel_max_mps2 = 2.0;      // per-axis primitive acceleration magnitude
  std::vector<double> search_durations_s{0.25, 0.5};
  double search_time_weight = 10.0;        // rho in  integral ||r||^2 dt + rho * T
  double goal_pos_tol_m = 0.3;
  double goal_vel_tol_mps = 0.3;
  double search_pos_voxel_m = 0.2;         // state-space dedup voxels
  double search_vel_voxel_mps = 0.25;
  int search_node_budget = 300000;
  double yaw_deadband_mps = 0.1;           // below this speed the yaw reference is held

  // Corridor generation
  double box_max_extent_m = 2.0;           // per-face growth limit from the seed
  int corridor_box_budget = 64;

  // FRS
  double frs_seed_variance_m2 = 1.0e-6;    // delta * I initial error shape

  // NMPC solve
  int sqp_max_iters = 30;
  double kkt_tol = 1.0e-6;
  double dyn_residual_tol = 1.0e-9;        // converged solutions satisfy the dynamics tighter
  double slack_tol_m = 0.01;               // above this the solution is flagged infeasible
  double dyn_penalty = 1.0e5;              // merit weight on dynamics defects

  // Simulation plant / observer
  double sim_dt_s = 0.005;
  double sim_force_noise_n = 0.0;          // truncated uniform noise bound on applied force
  double observer_tau_s = 0.1;             // low-pass time constant of the force estimate

  // Mission loop
  double track_divergence_m = 0.8;
  int braking_max_ticks = 3;
  double mission_timeout_s = 60.0;

  double hoverThrust() const { return mass_kg * gravity_mps2; }
  double thrustMax() const { return thrust_max_hover_factor * hoverThrust(); }
};

}  // namespace resilient

#endif  // RESILIENT_PARAMS_HPP
