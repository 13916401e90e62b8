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

#ifndef RESILIENT_FRS_HPP
#define RESILIENT_FRS_HPP

#include <string>
#include <vector>

#include "resilient/dynamics.hpp"
#include "resilient/params.hpp"

namespace resilient {

/// Symmetrizes and clamps tiny negative eigenvalues so downstream square
/// roots stay real. Matrices passing through the ellipsoid algebra are kept
/// symmetric PSD by construction; this guards against numerical drift.
template <typename Mat>
Mat makePsd(const Mat& q) {
  const Mat sym = 0.5 * (q + q.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  auto vals = es.eigenvalues();
  for (int i = 0; i < vals.size(); ++i) vals(i) = std::max(vals(i), 0.0);
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

/// Trace-weighted outer approximation of the Minkowski sum of two
/// co-centered ellipsoids: (1 + beta) Q1 + (1 + 1/beta) Q2 with
/// beta = sqrt(tr Q2 / tr Q1). A zero-trace operand is an empty summand and
/// returns the other operand unchanged.
template <typename Mat>
Mat outerSum(const Mat& q1, const Mat& q2) {
  const double t1 = q1.trace();
  const double t2 = q2.trace();
  if (t1 <= 0.0 && t2 <= 0.0) return Mat::Zero(q1.rows(), q1.cols());
  if (t1 <= 0.0) return q2;
  if (t2 <= 0.0) return q1;
  const double beta = std::sqrt(t2 / t1);
  return (1.0 + beta) * q1 + (1.0 + 1.0 / beta) * q2;
}

/// Body ellipsoid shape R diag{r^2, r^2, h^2} R^T.
Mat3 egoShape(const Mat3& rotation, double radius_m, double height_m);

/// One-step worst-case disturbance ellipsoid: the inf-norm force box of
/// bound w (newtons) is enclosed in the Euclidean ball of radius sqrt(3) w,
/// held for one sampling interval through the force channel D.
Mat9 disturbanceShape(const Mat9x3& D, double force_bound_n, double ts_s);

/// One propagation step of the error reachable set:
///   M       = exp(Gamma ts) (Q0 [+] Qd) exp(Gamma^T ts)
///   Q_ext   = top-left 3x3 position block of M
///   Q0_next = Q0 [+] Qd
struct PropagateResult {
  Mat3 q_ext;
  Mat9 q0_next;
};
PropagateResult propagateErrorShape(const Mat9& q0, const Mat9& qd, const Mat9& gamma,
                                    double ts_s);

/// Per-stage shapes of one planning horizon. q is the full safety boundary
/// q_ego [+] q_ext used by the corridor constraints.
struct FrsStage {
  Mat3 q_ego;
  Mat3 q_ext;
  Mat3 q;
};

struct FrsSequence {
  std::vector<FrsStage> stages;  // length N + 1

  int size() const { return static_cast<int>(stages.size()); }
};

/// Pre-computes the stage shape matrices for the next optimization from the
/// previous loop's planned states and inputs (the first loop passes a hover
/// plan). Gamma is re-linearized at every stage with the fixed gain K.
FrsSequence buildFrsSequence(const std::vector<QuadState>& prev_states,
                             const std::vector<ControlInput>& prev_inputs, const Vec3& b_ext_n,
                             const Mat4x9& feedback_gain, const PlannerParams& params);

/// Support-function margin of the ellipsoid (p, Q) against the halfspace
/// a . x <= b: returns sqrt(a^T Q a) + a . p, so containment is margin <= b.
double halfspaceMargin(const Vec3& p, const Mat3& q, const Vec3& a);

/// Membership test x in xi(0, Q) for possibly singular Q: the component of
/// x outside range(Q) must vanish and the pseudo-inverse quadratic form must
/// not exceed 1.
bool ellipsoidContains(const Eigen::MatrixXd& q, const Eigen::VectorXd& x, double tol = 1e-9);

/// Semi-axis lengths, sqrt of the eigenvalues.
Vec3 principalRadii(const Mat3& q);

/// Stage, tr(Q_ext) and the principal radii of Q per stage, as CSV.
void writeFrsCsv(const FrsSequence& seq, const std::string& path);

}  // namespace resilient

#endif  // RESILIENT_FRS_HPP
