#include <doctest.h>

#include <Eigen/Core>

#include <cmath>

#include "qdreach/arm.hpp"
#include "qdreach/common.hpp"

namespace {

using qdreach::ArmModel;
using qdreach::CubicTrajectory;
using qdreach::finite_difference_velocity;
using qdreach::forward_kinematics;

Eigen::VectorXd joints(double q0, double q1, double q2, double q3) {
  Eigen::VectorXd q(4);
  q << q0, q1, q2, q3;
  return q;
}

}  // namespace

TEST_SUITE("arm") {
  TEST_CASE("forward kinematics reproduces hand-worked poses") {
    const ArmModel arm;
    const double half_pi = 1.5707963267948966;

    // Home pose: the chain lies along +x at base height.
    const Eigen::Vector3d home = forward_kinematics(arm, joints(0, 0, 0, 0));
    CHECK(home.x() == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(home.y() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(home.z() == doctest::Approx(1.0).epsilon(1e-12));

    // First joint (about world z) swings the whole chain to +y.
    const Eigen::Vector3d swung = forward_kinematics(arm, joints(half_pi, 0, 0, 0));
    CHECK(std::abs(swung.x()) < 1e-12);
    CHECK(swung.y() == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(swung.z() == doctest::Approx(1.0).epsilon(1e-12));

    // Second joint (about local y) at -pi/2 points the remaining links up.
    const Eigen::Vector3d raised = forward_kinematics(arm, joints(0, -half_pi, 0, 0));
    CHECK(raised.x() == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(std::abs(raised.y()) < 1e-12);
    CHECK(raised.z() == doctest::Approx(1.9).epsilon(1e-12));

    // A generic pose, fixed by an independent recomputation.
    const Eigen::Vector3d generic = forward_kinematics(arm, joints(0.3, -0.55, 1.1, 0.8));
    CHECK(generic.x() == doctest::Approx(0.692383234173563).epsilon(1e-12));
    CHECK(generic.y() == doctest::Approx(0.6890226596756908).epsilon(1e-12));
    CHECK(generic.z() == doctest::Approx(1.094018169198209).epsilon(1e-12));
  }

  TEST_CASE("forward kinematics respects the base height") {
    ArmModel arm;
    arm.base_height = 0.5;
    const Eigen::Vector3d p = forward_kinematics(arm, joints(0, 0, 0, 0));
    CHECK(p.z() == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("cubic fit satisfies its boundary conditions to 1e-12") {
    qdreach::Rng rng(61);
    for (int i = 0; i < 200; ++i) {
      const double q0 = qdreach::uniform_in(rng, -2.0, 2.0);
      const double v0 = qdreach::uniform_in(rng, -4.0, 4.0);
      const double qf = qdreach::uniform_in(rng, -2.0, 2.0);
      const double vf = qdreach::uniform_in(rng, -4.0, 4.0);
      const double T = qdreach::uniform_in(rng, 0.3, 2.5);
      const CubicTrajectory c = CubicTrajectory::fit(q0, v0, qf, vf, T);
      CHECK(c.position(0.0) == doctest::Approx(q0).epsilon(1e-12));
      CHECK(c.velocity(0.0) == doctest::Approx(v0).epsilon(1e-12));
      CHECK(c.position(T) == doctest::Approx(qf).epsilon(1e-12));
      CHECK(c.velocity(T) == doctest::Approx(vf).epsilon(1e-12));
    }
  }

  TEST_CASE("cubic fit recovers dyadic coefficients exactly") {
    // With power-of-two inputs every intermediate is representable, so the
    // solve must return the generating coefficients bit-for-bit.
    const CubicTrajectory ref{0.25, -0.5, 0.75, 0.125, 2.0};
    const CubicTrajectory fit =
        CubicTrajectory::fit(ref.position(0.0), ref.velocity(0.0), ref.position(2.0),
                             ref.velocity(2.0), 2.0);
    CHECK(fit.a0 == 0.25);
    CHECK(fit.a1 == -0.5);
    CHECK(fit.a2 == 0.75);
    CHECK(fit.a3 == 0.125);
  }

  TEST_CASE("cubic fit matches an independently solved instance") {
    const CubicTrajectory c = CubicTrajectory::fit(0.2, -0.1, 1.1, 0.4, 1.7);
    CHECK(c.a0 == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(c.a1 == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(c.a2 == doctest::Approx(0.8166089965397926).epsilon(1e-12));
    CHECK(c.a3 == doctest::Approx(-0.26256869529818855).epsilon(1e-12));
    CHECK(c.position(0.77) == doctest::Approx(0.48729619987787515).epsilon(1e-12));
    CHECK(c.velocity(0.77) == doctest::Approx(0.6905469163443927).epsilon(1e-12));
    CHECK(c.acceleration(0.77) == doctest::Approx(0.42015062080195387).epsilon(1e-12));
  }

  TEST_CASE("stationary points are the interior roots of the velocity") {
    const CubicTrajectory c = CubicTrajectory::fit(0.2, -0.1, 1.1, 0.4, 1.7);
    double roots[2];
    const int n = c.stationary_points(roots);
    REQUIRE(n == 1);
    CHECK(roots[0] == doctest::Approx(0.06315234367392074).epsilon(1e-12));
    CHECK(std::abs(c.velocity(roots[0])) < 1e-12);
  }

  TEST_CASE("stationary points handle the quadratic degenerate case") {
    // a3 == 0 leaves a parabola with a single interior vertex.
    const CubicTrajectory parabola{0.0, -1.0, 1.0, 0.0, 2.0};
    double roots[2];
    REQUIRE(parabola.stationary_points(roots) == 1);
    CHECK(roots[0] == doctest::Approx(0.5).epsilon(1e-14));

    // Strictly monotone motion has none.
    const CubicTrajectory monotone{0.0, 5.0, 0.1, 0.01, 1.0};
    CHECK(monotone.stationary_points(roots) == 0);
  }

  TEST_CASE("finite-difference velocity matches an analytic path derivative") {
    const auto path = [](double t) {
      return Eigen::Vector3d(std::sin(1.3 * t), std::cos(0.7 * t), 0.5 * t * t - 0.3 * t * t * t);
    };
    const auto deriv = [](double t) {
      return Eigen::Vector3d(1.3 * std::cos(1.3 * t), -0.7 * std::sin(0.7 * t),
                             t - 0.9 * t * t);
    };
    const double t_end = 1.5;
    // Interior times use the central stencil, the interval ends fall back to
    // one-sided second-order stencils.
    for (double t : {0.0, 5e-5, 0.4, 1.2, 1.4999, t_end}) {
      CAPTURE(t);
      const Eigen::Vector3d fd = finite_difference_velocity(path, t, t_end);
      const Eigen::Vector3d exact = deriv(t);
      for (int d = 0; d < 3; ++d)
        CHECK(fd[d] == doctest::Approx(exact[d]).epsilon(1e-7));
    }
  }
}
