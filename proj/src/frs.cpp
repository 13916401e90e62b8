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

#include "resilient/frs.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace resilient {

Mat3 egoShape(const Mat3& rotation, double radius_m, double height_m) {
  const Vec3 axes(radius_m * radius_m, radius_m * radius_m, height_m * height_m);
  return rotation * axes.asDiagonal() * rotation.transpose();
}

Mat9 disturbanceShape(const Mat9x3& D, double force_bound_n, double ts_s) {
  if (force_bound_n < 0.0) throw std::invalid_argument("disturbanceShape: negative bound");
  if (ts_s <= 0.0) throw std::invalid_argument("disturbanceShape: ts must be positive");
  const Mat3 w = 3.0 * force_bound_n * force_bound_n * Mat3::Identity();
  return ts_s * ts_s * D * w * D.transpose();
}

PropagateResult propagateErrorShape(const Mat9& q0, const Mat9& qd, const Mat9& gamma,
                                    double ts_s) {
  PropagateResult out;
  out.q0_next = outerSum<Mat9>(q0, qd);
  const Mat9 expm = (gamma * ts_s).exp();
  const Mat9 m = expm * out.q0_next * expm.transpose();
  out.q_ext = makePsd<Mat3>(m.topLeftCorner<3, 3>());
  return out;
}

FrsSequence buildFrsSequence(const std::vector<QuadState>& prev_states,
                             const std::vector<ControlInput>& prev_inputs, const Vec3& b_ext_n,
                             const Mat4x9& feedback_gain, const PlannerParams& params) {
  const int n = params.horizon;
  if (static_cast<int>(prev_states.size()) != n + 1) {
    throw std::invalid_argument("buildFrsSequence: previous plan must have N+1 stages");
  }
  if (static_cast<int>(prev_inputs.size()) < n) {
    throw std::invalid_argument("buildFrsSequence: previous plan must have N inputs");
  }

  LinearizedSystem sys0 =
      linearize(prev_states[0], prev_inputs[0], b_ext_n, params);
  const Mat9 qd =
      disturbanceShape(sys0.D, params.mass_kg * params.force_noise_bound_mps2, params.ts_s);

  FrsSequence seq;
  seq.stages.reserve(n + 1);
  Mat9 q0 = params.frs_seed_variance_m2 * Mat9::Identity();
  for (int k = 0; k <= n; ++k) {
    const QuadState& xs = prev_states[k];
    const ControlInput& us = prev_inputs[std::min(k, n - 1)];
    FrsStage stage;
    stage.q_ego = egoShape(eulerZyxToRot(xs.roll, xs.pitch, xs.yaw), params.body_radius_m,
                           params.body_height_m);
    const Mat9 gamma = closedLoopMatrix(xs, us, b_ext_n, feedback_gain, params);
    const PropagateResult prop = propagateErrorShape(q0, qd, gamma, params.ts_s);
    q0 = prop.q0_next;
    stage.q_ext = prop.q_ext;
    stage.q = makePsd<Mat3>(outerSum<Mat3>(stage.q_ego, stage.q_ext));
    seq.stages.push_back(stage);
  }
  return seq;
}

double halfspaceMargin(const Vec3& p, const Mat3& q, const Vec3& a) {
  const double quad = a.dot(q * a);
  return std::sqrt(std::max(0.0, quad)) + a.dot(p);
}

bool ellipsoidContains(const Eigen::MatrixXd& q, const Eigen::VectorXd& x, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (q + q.transpose()));
  const double lead = std::max(es.eigenvalues().maxCoeff(), 0.0);
  const double rank_floor = std::max(lead, 1.0) * 1e-12;
  const Eigen::VectorXd coords = es.eigenvectors().transpose() * x;
  double quad = 0.0;
  for (int i = 0; i < coords.size(); ++i) {
    const double lambda = es.eigenvalues()(i);
    if (lambda <= rank_floor) {
      if (std::abs(coords(i)) > tol) return false;
    } else {
      quad += coords(i) * coords(i) / lambda;
    }
  }
  return quad <= 1.0 + tol;
}

Vec3 principalRadii(const Mat3& q) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(q);
  Vec3 out;
  for (int i = 0; i < 3; ++i) out(i) = std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  return out;
}

void writeFrsCsv(const FrsSequence& seq, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("writeFrsCsv: cannot open '" + path + "'");
  out << "stage,tr_q_ext,radius_min,radius_mid,radius_max\n";
  char line[160];
  for (int k = 0; k < seq.size(); ++k) {
    const Vec3 r = principalRadii(seq.stages[k].q);
    std::snprintf(line, sizeof(line), "%d,%.9g,%.9g,%.9g,%.9g\n", k,
                  seq.stages[k].q_ext.trace(), r(0), r(1), r(2));
    out << line;
  }
}

}  // namespace resilient
