#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

#include "qdreach/common.hpp"

namespace qdreach {

// Serial-chain desk arm. Joint axes alternate: even-indexed joints rotate
// about the world-up z axis, odd-indexed about the local y axis, so four
// joints already reach a full 3-D workspace. Each link extends along the
// local x axis.
struct ArmModel {
  int joint_count = 4;
  std::vector<double> link_lengths{0.3, 0.3, 0.3, 0.3};
  double base_height = 1.0;
  std::vector<double> home_pose{0.0, 0.0, 0.0, 0.0};
  double position_limit = 1.5707963267948966;  // ±rad
  double velocity_limit = 3.0;                 // ±rad/s

  void check() const {
    require(joint_count >= 2, "arm needs at least two joints");
    require(static_cast<int>(link_lengths.size()) == joint_count,
            "link length per joint required");
    for (double l : link_lengths) require(l > 0.0, "link lengths must be positive");
    require(static_cast<int>(home_pose.size()) == joint_count,
            "home pose entry per joint required");
    require(position_limit > 0.0 && velocity_limit > 0.0, "limits must be positive");
  }
};

// Gripper position for joint angles q, in world coordinates.
Eigen::Vector3d forward_kinematics(const ArmModel& arm, const Eigen::VectorXd& q);

// Third-order polynomial joint motion fixed by boundary positions and
// velocities over [0, T].
struct CubicTrajectory {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  double duration = 0.0;

  static CubicTrajectory fit(double q0, double v0, double qf, double vf, double duration);

  double position(double t) const { return a0 + t * (a1 + t * (a2 + t * a3)); }
  double velocity(double t) const { return a1 + t * (2.0 * a2 + t * 3.0 * a3); }
  double acceleration(double t) const { return 2.0 * a2 + 6.0 * a3 * t; }

  // Interior stationary points of the position polynomial within (0, T).
  // At most two; used for analytic limit checks between time samples.
  int stationary_points(double* out) const;
};

// Central finite-difference velocity of a 3-D path, second-order one-sided at
// the ends of the evaluation interval [0, t_end].
Eigen::Vector3d finite_difference_velocity(const std::function<Eigen::Vector3d(double)>& pos,
                                           double t, double t_end);

}  // namespace qdreach
