#include "qdreach/arm.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace qdreach {

Eigen::Vector3d forward_kinematics(const ArmModel& arm, const Eigen::VectorXd& q) {
  require(q.size() == arm.joint_count, "joint vector dimension mismatch");
  Eigen::Vector3d p(0.0, 0.0, arm.base_height);
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  for (int j = 0; j < arm.joint_count; ++j) {
    const Eigen::Vector3d axis = (j % 2 == 0) ? Eigen::Vector3d::UnitZ()
                                              : Eigen::Vector3d::UnitY();
    r = r * Eigen::AngleAxisd(q[j], axis).toRotationMatrix();
    p += r * Eigen::Vector3d(arm.link_lengths[static_cast<std::size_t>(j)], 0.0, 0.0);
  }
  return p;
}

CubicTrajectory CubicTrajectory::fit(double q0, double v0, double qf, double vf,
                                     double duration) {
  require(duration > 0.0, "trajectory duration must be positive");
  const double t = duration;
  const double delta = qf - q0;
  CubicTrajectory traj;
  traj.a0 = q0;
  traj.a1 = v0;
  traj.a2 = (3.0 * delta - (2.0 * v0 + vf) * t) / (t * t);
  traj.a3 = (-2.0 * delta + (v0 + vf) * t) / (t * t * t);
  traj.duration = duration;
  return traj;
}

int CubicTrajectory::stationary_points(double* out) const {
  // velocity(t) = a1 + 2 a2 t + 3 a3 t^2
  int count = 0;
  const double a = 3.0 * a3;
  const double b = 2.0 * a2;
  const double c = a1;
  if (a == 0.0) {
    if (b != 0.0) {
      const double t = -c / b;
      if (t > 0.0 && t < duration) out[count++] = t;
    }
    return count;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return 0;
  const double sq = std::sqrt(disc);
  for (const double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
    if (t > 0.0 && t < duration) out[count++] = t;
  }
  return count;
}

Eigen::Vector3d finite_difference_velocity(const std::function<Eigen::Vector3d(double)>& pos,
                                           double t, double t_end) {
  require(t_end > 0.0, "evaluation interval must be positive");
  require(t >= 0.0 && t <= t_end, "query time outside the evaluation interval");
  constexpr double dt = 1e-4;
  if (t < dt) {
    // Second-order forward stencil keeps endpoint velocities as accurate as
    // the interior central difference.
    return (-3.0 * pos(t) + 4.0 * pos(t + dt) - pos(t + 2.0 * dt)) / (2.0 * dt);
  }
  if (t > t_end - dt) {
    return (3.0 * pos(t) - 4.0 * pos(t - dt) + pos(t - 2.0 * dt)) / (2.0 * dt);
  }
  return (pos(t + dt) - pos(t - dt)) / (2.0 * dt);
}

}  // namespace qdreach
