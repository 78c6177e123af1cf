#include <doctest.h>

#include <Eigen/Core>

#include <cmath>
#include <vector>

#include "qdreach/arm.hpp"
#include "qdreach/common.hpp"
#include "qdreach/sim.hpp"

namespace {

using qdreach::ArmModel;
using qdreach::BallisticResult;
using qdreach::ballistic_landing;
using qdreach::eval_lever;
using qdreach::eval_throw;
using qdreach::Evaluation;
using qdreach::FailureReason;
using qdreach::GapConfig;
using qdreach::Genotype;
using qdreach::LeverConfig;
using qdreach::ThrowConfig;

Genotype genotype_of(const std::vector<double>& values) {
  Genotype g;
  g.values = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                               static_cast<Eigen::Index>(values.size()));
  return g;
}

// A throw action that is comfortably valid under the default arm; its
// behavior and quality below were fixed by an independent recomputation.
const std::vector<double> kPinnedThrow{0.55, 0.62, 0.48, 0.51, 0.7, 0.45, 0.52, 0.6, 0.35};
const std::vector<double> kPinnedThrowBehavior{
    1.0696048566497507,   0.6751557268372733, 1.1973792711672102, -0.03981214539227702,
    0.9417851973732202,   1.1769949157694373, -0.09255805453932366, 0.8170459426580975,
    1.1461453649745144,   -0.0620220974260457, 0.7008423865535598};
const double kPinnedThrowQuality = -2.989822029434035;

const std::vector<double> kPinnedLever{0.97804574578798,    0.4748768364757039,
                                       0.13092131214649905, 0.05172149166639106,
                                       0.9454165724399485,  0.2658094132750657,
                                       0.5040639065645509,  0.0907017660899686};
const std::vector<double> kPinnedLeverBehavior{
    0.32985292747680495, 0.21250250114928793, 1.0556377512505264, -0.4020785835549246,
    0.6988441662176994,  0.8349643560261686,  -0.5225296466577183, 0.6194543978012004};
const double kPinnedLeverQuality = -0.14979723565239667;

}  // namespace

TEST_SUITE("sim") {
  TEST_CASE("ballistic landing matches a hand-solved flight") {
    const BallisticResult r = ballistic_landing({0.5, -0.2, 1.3}, {1.2, 0.4, 2.0}, 9.81);
    REQUIRE(r.valid);
    CHECK(r.flight_time == doctest::Approx(0.7575884365227701).epsilon(1e-12));
    CHECK(r.landing.x() == doctest::Approx(1.409106123827324).epsilon(1e-12));
    CHECK(r.landing.y() == doctest::Approx(0.10303537460910805).epsilon(1e-12));
  }

  TEST_CASE("ballistic landing substitutes back into the motion equations") {
    qdreach::Rng rng(2718);
    for (int i = 0; i < 200; ++i) {
      const Eigen::Vector3d p0(qdreach::uniform_in(rng, -1.0, 1.0),
                               qdreach::uniform_in(rng, -1.0, 1.0),
                               qdreach::uniform_in(rng, 0.05, 2.0));
      const Eigen::Vector3d v0(qdreach::uniform_in(rng, -4.0, 4.0),
                               qdreach::uniform_in(rng, -4.0, 4.0),
                               qdreach::uniform_in(rng, -4.0, 4.0));
      const double g = 9.81;
      const BallisticResult r = ballistic_landing(p0, v0, g);
      REQUIRE(r.valid);
      const double t = r.flight_time;
      const double z = p0.z() + v0.z() * t - 0.5 * g * t * t;
      CHECK(std::abs(z) < 1e-9);
      CHECK(r.landing.x() == doctest::Approx(p0.x() + v0.x() * t).epsilon(1e-12));
      CHECK(r.landing.y() == doctest::Approx(p0.y() + v0.y() * t).epsilon(1e-12));
    }
  }

  TEST_CASE("a pinned throw reproduces its recorded behavior and quality") {
    const ArmModel arm;
    const ThrowConfig cfg;
    const Evaluation e = eval_throw(arm, cfg, GapConfig{}, genotype_of(kPinnedThrow));
    REQUIRE(e.valid);
    REQUIRE(e.behavior.dim() == 11);
    for (int d = 0; d < 11; ++d) {
      CAPTURE(d);
      CHECK(e.behavior.values[d] ==
            doctest::Approx(kPinnedThrowBehavior[static_cast<std::size_t>(d)]).epsilon(1e-9));
    }
    CHECK(e.quality == doctest::Approx(kPinnedThrowQuality).epsilon(1e-9));
  }

  TEST_CASE("joint offsets and release delay shift the flight but not the effort") {
    const ArmModel arm;
    const ThrowConfig cfg;
    GapConfig gap;
    gap.joint_offsets = {0.05, -0.05, 0.02, -0.03};
    gap.release_delay = 0.02;
    const Evaluation gapped = eval_throw(arm, cfg, gap, genotype_of(kPinnedThrow));
    REQUIRE(gapped.valid);
    const std::vector<double> expect{
        1.0158042685075186,  0.8521941941364904, 1.1993033542568161, 0.03211656808190651,
        0.995737193550261,   1.1896227394134964, -0.02167162042839402, 0.8701503242725906,
        1.1641396879191293,  0.007859346072870012, 0.7520812599946939};
    for (int d = 0; d < 11; ++d) {
      CAPTURE(d);
      CHECK(gapped.behavior.values[d] ==
            doctest::Approx(expect[static_cast<std::size_t>(d)]).epsilon(1e-9));
    }
    // Constant offsets leave the joint accelerations untouched, so the
    // effort score is bit-identical to the ungapped run.
    const Evaluation plain = eval_throw(arm, cfg, GapConfig{}, genotype_of(kPinnedThrow));
    CHECK(gapped.quality == plain.quality);
  }

  TEST_CASE("an explicit all-zero gap evaluates exactly like the default") {
    const ArmModel arm;
    const ThrowConfig cfg;
    GapConfig zero;
    zero.joint_offsets = {0.0, 0.0, 0.0, 0.0};
    zero.release_delay = 0.0;
    CHECK(zero.is_zero());
    CHECK(GapConfig{}.is_zero());

    const Evaluation a = eval_throw(arm, cfg, GapConfig{}, genotype_of(kPinnedThrow));
    const Evaluation b = eval_throw(arm, cfg, zero, genotype_of(kPinnedThrow));
    REQUIRE(a.valid);
    REQUIRE(b.valid);
    CHECK(a.quality == b.quality);
    for (int d = 0; d < 11; ++d) CHECK(a.behavior.values[d] == b.behavior.values[d]);
  }

  TEST_CASE("throw validity failures name the violated constraint") {
    const ArmModel arm;
    const ThrowConfig cfg;

    const Evaluation joint = eval_throw(
        arm, cfg, GapConfig{},
        genotype_of({0.6221792294411627, 0.9889601476818849, 0.21530869823559895,
                     0.16021203385784455, 0.6125396042730308, 0.04394200796138337,
                     0.03568027877359614, 0.5148888202713703, 0.4662060253252891}));
    CHECK_FALSE(joint.valid);
    CHECK(joint.failure == FailureReason::kJointLimit);

    const Evaluation vel = eval_throw(
        arm, cfg, GapConfig{},
        genotype_of({0.9171677731928523, 0.6292262544910104, 0.5141176465995139,
                     0.49687343539350426, 0.24751492202733083, 0.01179402554250586,
                     0.19240214398531064, 0.6920321208818392, 0.2006067239869952}));
    CHECK_FALSE(vel.valid);
    CHECK(vel.failure == FailureReason::kVelocityLimit);

    // The cubic overshoots between its endpoints: full-range swing with a
    // reversed final velocity at the shortest duration.
    const Evaluation overshoot = eval_throw(
        arm, cfg, GapConfig{},
        genotype_of({0.98, 0.5, 0.5, 0.5, 0.98, 0.5, 0.5, 0.5, 0.0}));
    CHECK_FALSE(overshoot.valid);
    CHECK(overshoot.failure == FailureReason::kVelocityLimit);
  }

  TEST_CASE("a low-mounted arm can sweep the gripper into the ground") {
    // The default base keeps the gripper strictly above the plane, so the
    // ground checks need a lowered base to fire at all.
    ArmModel arm;
    arm.base_height = 0.5;
    const ThrowConfig cfg;

    const Evaluation sweep = eval_throw(
        arm, cfg, GapConfig{},
        genotype_of({0.758705461154919, 0.8784801846662539, 0.1023199219220744,
                     0.8497683374661538, 0.39392733263233515, 0.47968392351227496,
                     0.14633456975819847, 0.6984263449470935, 0.291978615987851}));
    CHECK_FALSE(sweep.valid);
    CHECK(sweep.failure == FailureReason::kGroundCollision);

    // This action is fine when released on time but drags the extrapolated
    // gripper below the plane when the release is badly delayed.
    const Genotype late = genotype_of({0.16804170383275796, 0.6161163270034956,
                                       0.9019066415775158, 0.8826366511581263,
                                       0.13468016778590808, 0.6248687488469331,
                                       0.8925523288105455, 0.200275379917644,
                                       0.41474121707579237});
    CHECK(eval_throw(arm, cfg, GapConfig{}, late).valid);
    GapConfig delayed;
    delayed.release_delay = 1.5;
    const Evaluation dropped = eval_throw(arm, cfg, delayed, late);
    CHECK_FALSE(dropped.valid);
    CHECK(dropped.failure == FailureReason::kGroundCollision);
  }

  TEST_CASE("the throw landing is the ballistic image of the release state") {
    const ArmModel arm;
    const ThrowConfig cfg;
    const Genotype g = genotype_of(kPinnedThrow);
    const Evaluation e = eval_throw(arm, cfg, GapConfig{}, g);
    REQUIRE(e.valid);

    // Rebuild the commanded motion and release state independently.
    const double T = cfg.duration_min + (cfg.duration_max - cfg.duration_min) * g.values[8];
    std::vector<qdreach::CubicTrajectory> joints;
    for (int j = 0; j < 4; ++j) {
      const double qf = -arm.position_limit + 2.0 * arm.position_limit * g.values[j];
      const double vf = -arm.velocity_limit + 2.0 * arm.velocity_limit * g.values[4 + j];
      joints.push_back(qdreach::CubicTrajectory::fit(0.0, 0.0, qf, vf, T));
    }
    const auto gripper = [&](double t) {
      Eigen::VectorXd q(4);
      for (int j = 0; j < 4; ++j) q[j] = joints[static_cast<std::size_t>(j)].position(t);
      return qdreach::forward_kinematics(arm, q);
    };
    const Eigen::Vector3d p_release = gripper(T);
    const Eigen::Vector3d v_release = qdreach::finite_difference_velocity(gripper, T, T);
    const BallisticResult flight = ballistic_landing(p_release, v_release, cfg.gravity);
    REQUIRE(flight.valid);
    CHECK(e.behavior.values[0] == doctest::Approx(flight.landing.x()).epsilon(1e-9));
    CHECK(e.behavior.values[1] == doctest::Approx(flight.landing.y()).epsilon(1e-9));

    // And the waypoint block is the gripper path at the configured fractions.
    for (int w = 0; w < 3; ++w) {
      const Eigen::Vector3d p = gripper(cfg.waypoint_fractions[static_cast<std::size_t>(w)] * T);
      for (int d = 0; d < 3; ++d)
        CHECK(e.behavior.values[2 + 3 * w + d] == doctest::Approx(p[d]).epsilon(1e-12));
    }
  }

  TEST_CASE("a pinned lever press reproduces its recorded behavior and quality") {
    const ArmModel arm;
    const LeverConfig cfg;
    const Evaluation e = eval_lever(arm, cfg, GapConfig{}, genotype_of(kPinnedLever));
    REQUIRE(e.valid);
    REQUIRE(e.behavior.dim() == 8);
    for (int d = 0; d < 8; ++d) {
      CAPTURE(d);
      CHECK(e.behavior.values[d] ==
            doctest::Approx(kPinnedLeverBehavior[static_cast<std::size_t>(d)]).epsilon(1e-9));
    }
    CHECK(e.quality == doctest::Approx(kPinnedLeverQuality).epsilon(1e-9));
  }

  TEST_CASE("lever misses report no contact") {
    const ArmModel arm;
    const LeverConfig cfg;
    const Evaluation e = eval_lever(arm, cfg, GapConfig{},
                                    genotype_of({0.5, 0.9, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5}));
    CHECK_FALSE(e.valid);
    CHECK(e.failure == FailureReason::kNoContact);
  }

  TEST_CASE("lever robustness scoring is pure") {
    // The replica noise is seeded from the genotype, so re-evaluating the
    // same action must give the same quality bit-for-bit.
    const ArmModel arm;
    const LeverConfig cfg;
    const Evaluation a = eval_lever(arm, cfg, GapConfig{}, genotype_of(kPinnedLever));
    const Evaluation b = eval_lever(arm, cfg, GapConfig{}, genotype_of(kPinnedLever));
    REQUIRE(a.valid);
    CHECK(a.quality == b.quality);
    CHECK(a.quality <= 0.0);
  }

  TEST_CASE("lever angles stay within the clamp") {
    const ArmModel arm;
    const LeverConfig cfg;
    const Evaluation e = eval_lever(arm, cfg, GapConfig{}, genotype_of(kPinnedLever));
    REQUIRE(e.valid);
    CHECK(std::abs(e.behavior.values[0]) <= cfg.angle_clamp);
    CHECK(std::abs(e.behavior.values[1]) <= cfg.angle_clamp);
  }
}
