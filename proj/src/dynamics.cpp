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

#include "resilient/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace resilient {

namespace {

Mat3 dragMatrix(const PlannerParams& params) {
  Mat3 k = Mat3::Zero();
  k(0, 0) = params.drag_coeff_ns_per_m;
  k(1, 1) = params.drag_coeff_ns_per_m;
  return k;
}

Mat3 rotX(double a) {
  Mat3 r;
  r << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return r;
}

Mat3 rotY(double a) {
  Mat3 r;
  r << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return r;
}

Mat3 rotZ(double a) {
  Mat3 r;
  r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return r;
}

Mat3 dRotX(double a) {
  Mat3 r;
  r << 0, 0, 0, 0, -std::sin(a), -std::cos(a), 0, std::cos(a), -std::sin(a);
  return r;
}

Mat3 dRotY(double a) {
  Mat3 r;
  r << -std::sin(a), 0, std::cos(a), 0, 0, 0, -std::cos(a), 0, -std::sin(a);
  return r;
}

Mat3 dRotZ(double a) {
  Mat3 r;
  r << -std::sin(a), -std::cos(a), 0, std::cos(a), -std::sin(a), 0, 0, 0, 0;
  return r;
}

Vec9 derivativeVec(const Vec9& x, const Vec4& u, const Vec3& f_ext_n,
                   const PlannerParams& params) {
  const Mat3 r = eulerZyxToRot(x(6), x(7), x(8));
  const Vec3 v = x.segment<3>(3);
  const Vec3 thrust_world = r * Vec3(0, 0, u(3));
  const Vec3 drag = r * dragMatrix(params) * r.transpose() * v;
  Vec9 dx;
  dx.segment<3>(0) = v;
  dx.segment<3>(3) =
      (thrust_world - drag + f_ext_n) / params.mass_kg - Vec3(0, 0, params.gravity_mps2);
  dx(6) = u(0);
  dx(7) = u(1);
  dx(8) = u(2);
  return dx;
}

}  // namespace

double wrapAngle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a <= 0.0) a += 2.0 * M_PI;
  return a - M_PI;
}

Vec9 QuadState::toVec() const {
  Vec9 x;
  x << p, v, roll, pitch, yaw;
  return x;
}

QuadState QuadState::fromVec(const Vec9& x) {
  QuadState s;
  s.p = x.segment<3>(0);
  s.v = x.segment<3>(3);
  s.roll = x(6);
  s.pitch = x(7);
  s.yaw = x(8);
  return s;
}

QuadState QuadState::wrapped() const {
  QuadState s = *this;
  s.roll = wrapAngle(s.roll);
  s.pitch = wrapAngle(s.pitch);
  s.yaw = wrapAngle(s.yaw);
  return s;
}

bool QuadState::allFinite() const { return toVec().allFinite(); }

Vec4 ControlInput::toVec() const {
  return Vec4(roll_rate_radps, pitch_rate_radps, yaw_rate_radps, thrust_n);
}

ControlInput ControlInput::fromVec(const Vec4& u) {
  return ControlInput{u(0), u(1), u(2), u(3)};
}

ControlInput ControlInput::hover(const PlannerParams& params) {
  return ControlInput{0.0, 0.0, 0.0, params.hoverThrust()};
}

Mat3 eulerZyxToRot(double roll, double pitch, double yaw) {
  return rotZ(yaw) * rotY(pitch) * rotX(roll);
}

Vec3 dragForce(const QuadState& x, const PlannerParams& params) {
  const Mat3 r = eulerZyxToRot(x.roll, x.pitch, x.yaw);
  return r * dragMatrix(params) * r.transpose() * x.v;
}

Vec9 stateDerivative(const QuadState& x, const ControlInput& u, const Vec3& f_ext_n,
                     const PlannerParams& params) {
  return derivativeVec(x.toVec(), u.toVec(), f_ext_n, params);
}

QuadState rk4StepField(const QuadState& x, const ControlInput& u,
                       const std::function<Vec3(const Vec3&)>& force_at, double dt,
                       const PlannerParams& params, bool wrap_angles) {
  const Vec9 x0 = x.toVec();
  const Vec4 uv = u.toVec();
  const Vec9 k1 = derivativeVec(x0, uv, force_at(x0.segment<3>(0)), params);
  const Vec9 x2 = x0 + 0.5 * dt * k1;
  const Vec9 k2 = derivativeVec(x2, uv, force_at(x2.segment<3>(0)), params);
  const Vec9 x3 = x0 + 0.5 * dt * k2;
  const Vec9 k3 = derivativeVec(x3, uv, force_at(x3.segment<3>(0)), params);
  const Vec9 x4 = x0 + dt * k3;
  const Vec9 k4 = derivativeVec(x4, uv, force_at(x4.segment<3>(0)), params);
  QuadState out = QuadState::fromVec(x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  return wrap_angles ? out.wrapped() : out;
}

QuadState rk4Step(const QuadState& x, const ControlInput& u, const Vec3& f_ext_n, double dt,
                  const PlannerParams& params, bool wrap_angles) {
  return rk4StepField(
      x, u, [&](const Vec3&) { return f_ext_n; }, dt, params, wrap_angles);
}

LinearizedSystem linearize(const QuadState& x, const ControlInput& u, const Vec3& /*b_ext_n*/,
                           const PlannerParams& params) {
  LinearizedSystem sys;
  const double m = params.mass_kg;
  const Mat3 rx = rotX(x.roll), ry = rotY(x.pitch), rz = rotZ(x.yaw);
  const Mat3 r = rz * ry * rx;
  const Mat3 dr_roll = rz * ry * dRotX(x.roll);
  const Mat3 dr_pitch = rz * dRotY(x.pitch) * rx;
  const Mat3 dr_yaw = dRotZ(x.yaw) * ry * rx;
  const Mat3 kd = dragMatrix(params);
  const Vec3 tb(0, 0, u.thrust_n);

  sys.A.block<3, 3>(0, 3) = Mat3::Identity();
  sys.A.block<3, 3>(3, 3) = -(r * kd * r.transpose()) / m;
  const Mat3 dr[3] = {dr_roll, dr_pitch, dr_yaw};
  for (int i = 0; i < 3; ++i) {
    const Mat3 ddrag = dr[i] * kd * r.transpose() + r * kd * dr[i].transpose();
    sys.A.block<3, 1>(3, 6 + i) = (dr[i] * tb - ddrag * x.v) / m;
  }

  sys.B.block<3, 1>(3, 3) = r.col(2) / m;
  sys.B(6, 0) = 1.0;
  sys.B(7, 1) = 1.0;
  sys.B(8, 2) = 1.0;

  sys.D.block<3, 3>(3, 0) = Mat3::Identity() / m;
  return sys;
}

DiscreteStep rk4StepWithJacobians(const Vec9& x, const Vec4& u, const Vec3& f_ext_n, double dt,
                                  const PlannerParams& params) {
  struct StageJac {
    Mat9 A;
    Mat9x4 B;
  };
  auto jac = [&](const Vec9& xs) {
    const LinearizedSystem l =
        linearize(QuadState::fromVec(xs), ControlInput::fromVec(u), f_ext_n, params);
    return StageJac{l.A, l.B};
  };

  const Vec9 k1 = derivativeVec(x, u, f_ext_n, params);
  const StageJac j1 = jac(x);
  const Mat9 dk1_dx = j1.A;
  const Mat9x4 dk1_du = j1.B;

  const Vec9 x2 = x + 0.5 * dt * k1;
  const Vec9 k2 = derivativeVec(x2, u, f_ext_n, params);
  const StageJac j2 = jac(x2);
  const Mat9 dk2_dx = j2.A * (Mat9::Identity() + 0.5 * dt * dk1_dx);
  const Mat9x4 dk2_du = j2.A * (0.5 * dt * dk1_du) + j2.B;

  const Vec9 x3 = x + 0.5 * dt * k2;
  const Vec9 k3 = derivativeVec(x3, u, f_ext_n, params);
  const StageJac j3 = jac(x3);
  const Mat9 dk3_dx = j3.A * (Mat9::Identity() + 0.5 * dt * dk2_dx);
  const Mat9x4 dk3_du = j3.A * (0.5 * dt * dk2_du) + j3.B;

  const Vec9 x4 = x + dt * k3;
  const Vec9 k4 = derivativeVec(x4, u, f_ext_n, params);
  const StageJac j4 = jac(x4);
  const Mat9 dk4_dx = j4.A * (Mat9::Identity() + dt * dk3_dx);
  const Mat9x4 dk4_du = j4.A * (dt * dk3_du) + j4.B;

  DiscreteStep out;
  out.next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  out.A = Mat9::Identity() + (dt / 6.0) * (dk1_dx + 2.0 * dk2_dx + 2.0 * dk3_dx + dk4_dx);
  out.B = (dt / 6.0) * (dk1_du + 2.0 * dk2_du + 2.0 * dk3_du + dk4_du);
  return out;
}

Mat4x9 lqrFeedbackGain(const Mat9& A, const Mat9x4& B,
                       const Eigen::Matrix<double, 9, 1>& state_weights,
                       const Vec4& input_weights) {
  constexpr int n = 9;
  const Mat9 Q = state_weights.asDiagonal();
  const Vec4 rinv_diag = input_weights.cwiseInverse();
  const Mat9 BRinvBt = B * rinv_diag.asDiagonal() * B.transpose();

  Eigen::Matrix<double, 2 * n, 2 * n> ham;
  ham.topLeftCorner(n, n) = A;
  ham.topRightCorner(n, n) = -BRinvBt;
  ham.bottomLeftCorner(n, n) = -Q;
  ham.bottomRightCorner(n, n) = -A.transpose();

  Eigen::ComplexEigenSolver<Eigen::MatrixXd> es(ham);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("lqrFeedbackGain: Hamiltonian eigensolve failed");
  }

  Eigen::MatrixXcd stable(2 * n, n);
  int count = 0;
  for (int i = 0; i < 2 * n; ++i) {
    if (es.eigenvalues()(i).real() < -1e-9) {
      if (count == n) {
        throw std::runtime_error("lqrFeedbackGain: too many stable Hamiltonian modes");
      }
      stable.col(count++) = es.eigenvectors().col(i);
    }
  }
  if (count != n) {
    std::ostringstream msg;
    msg << "lqrFeedbackGain: Riccati solve failed, " << count << " stable modes (expected " << n
        << "); (A, B) not stabilizable with these weights";
    throw std::runtime_error(msg.str());
  }

  const Eigen::MatrixXcd u1 = stable.topRows(n);
  const Eigen::MatrixXcd u2 = stable.bottomRows(n);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(u1);
  if (!lu.isInvertible()) {
    throw std::runtime_error("lqrFeedbackGain: stable subspace is singular in the state block");
  }
  Mat9 P = (u2 * lu.inverse()).real();
  P = 0.5 * (P + P.transpose()).eval();

  const Mat9 residual =
      A.transpose() * P + P * A - P * BRinvBt * P + Q;
  if (residual.cwiseAbs().maxCoeff() > 1e-6 * std::max(1.0, P.cwiseAbs().maxCoeff())) {
    throw std::runtime_error("lqrFeedbackGain: Riccati residual did not close");
  }

  return -(rinv_diag.asDiagonal() * (B.transpose() * P));
}

LinearizedSystem hoverSystem(const QuadState& at, const PlannerParams& params) {
  QuadState hover;
  hover.p = at.p;
  hover.yaw = at.yaw;
  LinearizedSystem sys = linearize(hover, ControlInput::hover(params), Vec3::Zero(), params);
  sys.K = lqrFeedbackGain(sys.A, sys.B, params.lqr_state_weights, params.lqr_input_weights);
  sys.gamma = sys.A + sys.B * sys.K;
  return sys;
}

Mat9 closedLoopMatrix(const QuadState& x, const ControlInput& u, const Vec3& b_ext_n,
                      const Mat4x9& K, const PlannerParams& params) {
  const LinearizedSystem sys = linearize(x, u, b_ext_n, params);
  return sys.A + sys.B * K;
}

}  // namespace resilient
