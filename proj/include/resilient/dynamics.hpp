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

#ifndef RESILIENT_DYNAMICS_HPP
#define RESILIENT_DYNAMICS_HPP

#include <Eigen/Dense>
#include <functional>

#include "resilient/params.hpp"

namespace resilient {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Mat9x4 = Eigen::Matrix<double, 9, 4>;
using Mat9x3 = Eigen::Matrix<double, 9, 3>;
using Mat4x9 = Eigen::Matrix<double, 4, 9>;

/// Wraps an angle into (-pi, pi].
double wrapAngle(double a);

/// 9-dim rigid-body state: position, velocity, ZYX Euler angles.
struct QuadState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  Vec9 toVec() const;
  static QuadState fromVec(const Vec9& x);
  QuadState wrapped() const;
  bool allFinite() const;
};

/// Commanded Euler-angle rates plus collective thrust.
struct ControlInput {
  double roll_rate_radps = 0.0;
  double pitch_rate_radps = 0.0;
  double yaw_rate_radps = 0.0;
  double thrust_n = 0.0;

  Vec4 toVec() const;
  static ControlInput fromVec(const Vec4& u);
  static ControlInput hover(const PlannerParams& params);
};

/// Nominal external force plus the inf-norm bound on its residual noise.
struct ExternalForce {
  Vec3 nominal_n = Vec3::Zero();
  double noise_bound_n = 0.0;
};

/// Continuous-time linearization about a nominal point, with the
/// error-feedback gain and closed-loop matrix Gamma = A + B K.
struct LinearizedSystem {
  Mat9 A = Mat9::Zero();
  Mat9x4 B = Mat9x4::Zero();
  Mat9x3 D = Mat9x3::Zero();
  Mat4x9 K = Mat4x9::Zero();
  Mat9 gamma = Mat9::Zero();
};

/// World-from-body rotation for ZYX (yaw-pitch-roll) Euler angles,
/// R = Rz(yaw) * Ry(pitch) * Rx(roll). This is the single rotation
/// convention of the whole codebase.
Mat3 eulerZyxToRot(double roll, double pitch, double yaw);

/// First-order rotor drag R * diag{k_d, k_d, 0} * R^T * v, in newtons.
Vec3 dragForce(const QuadState& x, const PlannerParams& params);

/// Continuous state derivative with an external force in newtons (world frame).
Vec9 stateDerivative(const QuadState& x, const ControlInput& u, const Vec3& f_ext_n,
                     const PlannerParams& params);

/// One RK4 step with a position-dependent force field, evaluated at every
/// RK4 sample point. All step variants funnel through this routine so the
/// plant and the planner integrate the exact same model.
QuadState rk4StepField(const QuadState& x, const ControlInput& u,
                       const std::function<Vec3(const Vec3&)>& force_at, double dt,
                       const PlannerParams& params, bool wrap_angles = true);

/// One RK4 step under a constant external force; angles re-wrapped unless
/// the caller needs a continuous angle chart (the NMPC prediction does).
QuadState rk4Step(const QuadState& x, const ControlInput& u, const Vec3& f_ext_n, double dt,
                  const PlannerParams& params, bool wrap_angles = true);

/// Analytic continuous-time Jacobians A = df/dx, B = df/du, D = df/dF
/// evaluated at (x, u, b_ext). K and gamma are left zero.
LinearizedSystem linearize(const QuadState& x, const ControlInput& u, const Vec3& b_ext_n,
                           const PlannerParams& params);

/// Discrete RK4 transition x+ = f_d(x, u, f_ext) with exact Jacobians of
/// the integrator (chain rule through the four stages). No angle wrap.
struct DiscreteStep {
  Vec9 next = Vec9::Zero();
  Mat9 A = Mat9::Zero();
  Mat9x4 B = Mat9x4::Zero();
};
DiscreteStep rk4StepWithJacobians(const Vec9& x, const Vec4& u, const Vec3& f_ext_n, double dt,
                                  const PlannerParams& params);

/// Infinite-horizon continuous LQR gain for (A, B) with diagonal weights.
/// Solves the algebraic Riccati equation through the Hamiltonian spectral
/// factorization; throws std::runtime_error when no stabilizing solution
/// exists (e.g. B = 0) or the Riccati residual fails to close.
Mat4x9 lqrFeedbackGain(const Mat9& A, const Mat9x4& B,
                       const Eigen::Matrix<double, 9, 1>& state_weights,
                       const Vec4& input_weights);

/// Linearization at the hover equilibrium of the given state's yaw, with
/// the mission-constant LQR gain and Gamma filled in.
LinearizedSystem hoverSystem(const QuadState& at, const PlannerParams& params);

/// Gamma = A + B K at an arbitrary nominal point, reusing a fixed gain.
Mat9 closedLoopMatrix(const QuadState& x, const ControlInput& u, const Vec3& b_ext_n,
                      const Mat4x9& K, const PlannerParams& params);

}  // namespace resilient

#endif  // RESILIENT_DYNAMICS_HPP
