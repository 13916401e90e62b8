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

#include <doctest.h>

#include <cmath>
#include <random>

namespace resilient {
namespace {

Vec3 randomUnit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v(n(rng), n(rng), n(rng));
  while (v.norm() < 1e-6) v = Vec3(n(rng), n(rng), n(rng));
  return v.normalized();
}

Mat3 randomPd(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = n(rng);
  return scale * (m * m.transpose() + 0.1 * Mat3::Identity());
}

double support(const Mat3& q, const Vec3& a) { return std::sqrt(a.dot(q * a)); }

TEST_CASE("outer sum") {
  SUBCASE("equal unit balls give radius two") {
    const Mat3 s = outerSum<Mat3>(Mat3::Identity(), Mat3::Identity());
    CHECK((s - 4.0 * Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("co-centered balls of radii 2 and 1 sum exactly to radius 3") {
    const Mat3 s = outerSum<Mat3>(4.0 * Mat3::Identity(), Mat3::Identity());
    CHECK((s - 9.0 * Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("zero-trace operands pass the other through") {
    std::mt19937_64 rng(5);
    const Mat3 q = randomPd(rng);
    CHECK(outerSum<Mat3>(Mat3::Zero(), q) == q);
    CHECK(outerSum<Mat3>(q, Mat3::Zero()) == q);
    CHECK(outerSum<Mat3>(Mat3::Zero(), Mat3::Zero()).isZero());
  }
  SUBCASE("support dominance over the Minkowski sum") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
      const Mat3 q1 = randomPd(rng);
      const Mat3 q2 = randomPd(rng, 0.5);
      const Mat3 s = outerSum<Mat3>(q1, q2);
      for (int j = 0; j < 20; ++j) {
        const Vec3 a = randomUnit(rng);
        CHECK(support(s, a) >= support(q1, a) + support(q2, a) - 1e-9);
      }
    }
  }
  SUBCASE("commutative and scale covariant") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 50; ++i) {
      const Mat3 q1 = randomPd(rng);
      const Mat3 q2 = randomPd(rng);
      CHECK((outerSum<Mat3>(q1, q2) - outerSum<Mat3>(q2, q1)).cwiseAbs().maxCoeff() < 1e-10);
      const double c = 3.7;
      const Mat3 lhs = outerSum<Mat3>(Mat3(c * q1), Mat3(c * q2));
      const Mat3 rhs = c * outerSum<Mat3>(q1, q2);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9 * c);
    }
  }
  SUBCASE("psd preserved") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 50; ++i) {
      const Mat3 s = outerSum<Mat3>(randomPd(rng), randomPd(rng));
      Eigen::SelfAdjointEigenSolver<Mat3> es(s);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("ego shape") {
  SUBCASE("identity attitude gives the stock diagonal") {
    const Mat3 q = egoShape(Mat3::Identity(), 0.22, 0.13);
    CHECK(q(0, 0) == doctest::Approx(0.0484).epsilon(1e-12));
    CHECK(q(1, 1) == doctest::Approx(0.0484).epsilon(1e-12));
    CHECK(q(2, 2) == doctest::Approx(0.0169).epsilon(1e-12));
    CHECK(q(0, 1) == doctest::Approx(0.0));
  }
  SUBCASE("eigenvalues are rotation invariant") {
    std::mt19937_64 rng(3);
    const Mat3 r = eulerZyxToRot(0.4, -0.2, 1.1);
    const Mat3 q = egoShape(r, 0.22, 0.13);
    Eigen::SelfAdjointEigenSolver<Mat3> es(q);
    CHECK(es.eigenvalues()(0) == doctest::Approx(0.0169).epsilon(1e-9));
    CHECK(es.eigenvalues()(1) == doctest::Approx(0.0484).epsilon(1e-9));
    CHECK(es.eigenvalues()(2) == doctest::Approx(0.0484).epsilon(1e-9));
  }
  SUBCASE("yaw-only rotation leaves the axisymmetric shape unchanged") {
    const Mat3 q0 = egoShape(Mat3::Identity(), 0.22, 0.13);
    const Mat3 q1 = egoShape(eulerZyxToRot(0, 0, 2.2), 0.22, 0.13);
    CHECK((q0 - q1).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("disturbance shape") {
  PlannerParams p;
  const LinearizedSystem sys = linearize(QuadState{}, ControlInput::hover(p), Vec3::Zero(), p);

  SUBCASE("zero bound gives the zero matrix") {
    CHECK(disturbanceShape(sys.D, 0.0, 0.05).isZero());
  }
  SUBCASE("velocity block magnitude") {
    const Mat9 qd = disturbanceShape(sys.D, 0.5, 0.05);
    for (int i = 3; i < 6; ++i) CHECK(qd(i, i) == doctest::Approx(1.875e-3).epsilon(1e-9));
    CHECK(qd.topLeftCorner<3, 3>().isZero());
    CHECK(qd.bottomRightCorner<3, 3>().isZero());
  }
  SUBCASE("monte carlo one-step errors stay inside") {
    const double wb = 0.5;
    const double ts = 0.05;
    const Mat9 qd = disturbanceShape(sys.D, wb, ts);
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-wb, wb);
    int contained = 0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) {
      const Vec3 w(u(rng), u(rng), u(rng));
      const Vec9 err = ts * (sys.D * w);
      if (ellipsoidContains(qd, err)) ++contained;
    }
    CHECK(contained == trials);
  }
}

TEST_CASE("error shape propagation") {
  std::mt19937_64 rng(31);
  Mat9 q0 = Mat9::Zero();
  q0.topLeftCorner<3, 3>() = randomPd(rng);
  q0.block<3, 3>(3, 3) = randomPd(rng);

  SUBCASE("identity exponential when gamma is zero") {
    Mat9 qd = Mat9::Zero();
    qd.block<3, 3>(3, 3) = randomPd(rng, 0.1);
    const PropagateResult r = propagateErrorShape(q0, qd, Mat9::Zero(), 0.05);
    const Mat9 expect = outerSum<Mat9>(q0, qd);
    CHECK((r.q0_next - expect).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((r.q_ext - expect.topLeftCorner<3, 3>()).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("no disturbance and zero gamma is a no-op") {
    const PropagateResult r = propagateErrorShape(q0, Mat9::Zero(), Mat9::Zero(), 0.05);
    CHECK((r.q0_next - q0).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((r.q_ext - q0.topLeftCorner<3, 3>()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("stable gamma contracts the trace bound from its eigenvalues") {
    Mat9 gamma = -0.8 * Mat9::Identity();
    const double ts = 0.1;
    const PropagateResult r = propagateErrorShape(q0, Mat9::Zero(), gamma, ts);
    // exp(gamma ts) scales uniformly by e^{-0.8 ts}; the position block
    // trace must contract by exactly its square.
    const double kappa = std::exp(-2.0 * 0.8 * ts);
    CHECK(r.q_ext.trace() == doctest::Approx(kappa * q0.topLeftCorner<3, 3>().trace()));
    CHECK(r.q_ext.trace() <= q0.topLeftCorner<3, 3>().trace());
  }
}

TEST_CASE("frs sequence") {
  PlannerParams p;
  const LinearizedSystem hover = hoverSystem(QuadState{}, p);
  std::vector<QuadState> states(p.horizon + 1, QuadState{});
  std::vector<ControlInput> inputs(p.horizon, ControlInput::hover(p));

  SUBCASE("no uncertainty reduces to the body shape") {
    PlannerParams p0 = p;
    p0.force_noise_bound_mps2 = 0.0;
    p0.frs_seed_variance_m2 = 1e-14;
    const FrsSequence seq = buildFrsSequence(states, inputs, Vec3::Zero(), hover.K, p0);
    REQUIRE(seq.size() == p.horizon + 1);
    for (const auto& st : seq.stages) {
      CHECK((st.q - st.q_ego).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
  SUBCASE("error trace grows along the horizon") {
    const FrsSequence seq = buildFrsSequence(states, inputs, Vec3::Zero(), hover.K, p);
    for (int k = 1; k <= p.horizon; ++k) {
      CHECK(seq.stages[k].q_ext.trace() >=
            seq.stages[k - 1].q_ext.trace() - 1e-9);
    }
  }
  SUBCASE("containment chain by support dominance") {
    const FrsSequence seq = buildFrsSequence(states, inputs, Vec3::Zero(), hover.K, p);
    std::mt19937_64 rng(41);
    for (const auto& st : seq.stages) {
      for (int j = 0; j < 50; ++j) {
        const Vec3 a = randomUnit(rng);
        CHECK(support(st.q, a) >= support(st.q_ego, a) - 1e-9);
        CHECK(support(st.q, a) >= support(st.q_ext, a) - 1e-9);
      }
    }
  }
  SUBCASE("terminal trace stays bounded over repeated cycles") {
    double worst = 0.0;
    for (int cycle = 0; cycle < 100; ++cycle) {
      const FrsSequence seq = buildFrsSequence(states, inputs, Vec3::Zero(), hover.K, p);
      worst = std::max(worst, seq.stages[p.horizon].q_ext.trace());
    }
    CHECK(worst < 1.0);  // square meters; desk-scale cap
  }
}

TEST_CASE("halfspace margin") {
  SUBCASE("unit ball against an axis plane") {
    CHECK(halfspaceMargin(Vec3(3, 0, 0), Mat3::Identity(), Vec3(1, 0, 0)) ==
          doctest::Approx(4.0));
  }
  SUBCASE("exact tangency") {
    CHECK(halfspaceMargin(Vec3(4, 0, 0), Mat3::Identity(), Vec3(1, 0, 0)) ==
          doctest::Approx(5.0));
  }
  SUBCASE("margin equals the support function closed form") {
    std::mt19937_64 rng(53);
    std::normal_distribution<double> n(0.0, 2.0);
    for (int i = 0; i < 100; ++i) {
      const Mat3 q = randomPd(rng);
      const Vec3 p(n(rng), n(rng), n(rng));
      const Vec3 a = randomUnit(rng);
      // Lagrangian maximizer of a . x over the ellipsoid boundary.
      const Vec3 xstar = p + q * a / std::sqrt(a.dot(q * a));
      CHECK(halfspaceMargin(p, q, a) == doctest::Approx(a.dot(xstar)).epsilon(1e-10));
    }
  }
  SUBCASE("boundary sampling never exceeds the margin") {
    std::mt19937_64 rng(59);
    for (int i = 0; i < 20; ++i) {
      const Mat3 q = randomPd(rng);
      const Vec3 p(1.0, -2.0, 0.5);
      const Vec3 a = randomUnit(rng);
      const Eigen::LLT<Mat3> llt(q);
      double best = -1e18;
      for (int j = 0; j < 2000; ++j) {
        const Vec3 x = p + llt.matrixL() * randomUnit(rng);
        best = std::max(best, a.dot(x));
      }
      CHECK(best <= halfspaceMargin(p, q, a) + 1e-9);
    }
  }
}

TEST_CASE("ellipsoid membership handles singular shapes") {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(3, 3);
  q(0, 0) = 4.0;
  CHECK(ellipsoidContains(q, Eigen::Vector3d(1.9, 0, 0)));
  CHECK_FALSE(ellipsoidContains(q, Eigen::Vector3d(2.1, 0, 0)));
  CHECK_FALSE(ellipsoidContains(q, Eigen::Vector3d(0.0, 0.1, 0)));
}

}  // namespace
}  // namespace resilient
