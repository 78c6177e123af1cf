#include "qdreach/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qdreach {

namespace {

double lerp(double lo, double hi, double u) { return lo + (hi - lo) * u; }

double reach_radius(const ArmModel& arm) {
  double sum = 0.0;
  for (double l : arm.link_lengths) sum += l;
  return sum;
}

BehaviorBounds throw_bounds(const ArmModel& arm, const ThrowConfig& cfg) {
  const double reach = reach_radius(arm);
  BehaviorBounds b;
  b.lo.resize(11);
  b.hi.resize(11);
  b.lo[0] = b.lo[1] = -cfg.landing_bound;
  b.hi[0] = b.hi[1] = cfg.landing_bound;
  for (int w = 0; w < 3; ++w) {
    const int base = 2 + 3 * w;
    b.lo[base + 0] = -reach;
    b.hi[base + 0] = reach;
    b.lo[base + 1] = -reach;
    b.hi[base + 1] = reach;
    b.lo[base + 2] = 0.0;
    b.hi[base + 2] = arm.base_height + reach;
  }
  return b;
}

BehaviorBounds lever_bounds(const ArmModel& arm, const LeverConfig& cfg) {
  const double reach = reach_radius(arm);
  BehaviorBounds b;
  b.lo.resize(8);
  b.hi.resize(8);
  b.lo[0] = b.lo[1] = -cfg.angle_clamp;
  b.hi[0] = b.hi[1] = cfg.angle_clamp;
  for (int w = 0; w < 2; ++w) {
    const int base = 2 + 3 * w;
    b.lo[base + 0] = -reach;
    b.hi[base + 0] = reach;
    b.lo[base + 1] = -reach;
    b.hi[base + 1] = reach;
    b.lo[base + 2] = 0.0;
    b.hi[base + 2] = arm.base_height + reach;
  }
  return b;
}

struct TrajectorySet {
  std::vector<CubicTrajectory> joints;
  std::vector<double> offsets;  // empty means a strict zero gap
  double duration = 0.0;

  Eigen::VectorXd positions(double t) const {
    Eigen::VectorXd q(static_cast<Eigen::Index>(joints.size()));
    for (std::size_t j = 0; j < joints.size(); ++j) {
      q[static_cast<Eigen::Index>(j)] = joints[j].position(t);
      if (!offsets.empty()) q[static_cast<Eigen::Index>(j)] += offsets[j];
    }
    return q;
  }
};

// Shared validity gate: joint positions within limits at every sample and at
// the analytic extrema of each cubic, velocities within limits at every
// sample, gripper above the ground plane at every sample. The first violated
// class names the failure.
FailureReason check_validity(const ArmModel& arm, const TrajectorySet& traj, int samples) {
  const double dt = traj.duration / static_cast<double>(samples - 1);
  for (int j = 0; j < arm.joint_count; ++j) {
    const CubicTrajectory& c = traj.joints[static_cast<std::size_t>(j)];
    const double offset = traj.offsets.empty() ? 0.0 : traj.offsets[static_cast<std::size_t>(j)];
    for (int s = 0; s < samples; ++s) {
      const double q = c.position(dt * static_cast<double>(s)) + offset;
      if (std::abs(q) > arm.position_limit) return FailureReason::kJointLimit;
    }
    double stationary[2];
    const int n_st = c.stationary_points(stationary);
    for (int s = 0; s < n_st; ++s) {
      const double q = c.position(stationary[s]) + offset;
      if (std::abs(q) > arm.position_limit) return FailureReason::kJointLimit;
    }
  }
  for (int j = 0; j < arm.joint_count; ++j) {
    const CubicTrajectory& c = traj.joints[static_cast<std::size_t>(j)];
    for (int s = 0; s < samples; ++s) {
      if (std::abs(c.velocity(dt * static_cast<double>(s))) > arm.velocity_limit)
        return FailureReason::kVelocityLimit;
    }
  }
  for (int s = 0; s < samples; ++s) {
    const Eigen::Vector3d p = forward_kinematics(arm, traj.positions(dt * static_cast<double>(s)));
    if (p.z() <= 0.0) return FailureReason::kGroundCollision;
  }
  return FailureReason::kNone;
}

struct LeverCore {
  bool valid = false;
  FailureReason failure = FailureReason::kNone;
  double roll = 0.0;
  double pitch = 0.0;
  Eigen::Vector3d waypoints[2];
};

LeverCore lever_core(const ArmModel& arm, const LeverConfig& cfg, const GapConfig& gap,
                     const Genotype& genotype) {
  LeverCore out;
  const int joints = arm.joint_count;

  TrajectorySet traj;
  traj.duration = cfg.duration;
  traj.offsets = gap.is_zero() ? std::vector<double>{} : gap.joint_offsets;
  traj.joints.reserve(static_cast<std::size_t>(joints));
  for (int j = 0; j < joints; ++j) {
    const double qf = lerp(-arm.position_limit, arm.position_limit, genotype.values[j]);
    const double vf = lerp(-arm.velocity_limit, arm.velocity_limit, genotype.values[joints + j]);
    traj.joints.push_back(CubicTrajectory::fit(arm.home_pose[static_cast<std::size_t>(j)], 0.0,
                                               qf, vf, cfg.duration));
  }

  out.failure = check_validity(arm, traj, cfg.validity_samples);
  if (out.failure != FailureReason::kNone) return out;

  // Contact: gripper dips into the sphere around the lever tip at any sample;
  // the deepest sample sets the lever deflection.
  const double dt = cfg.duration / static_cast<double>(cfg.validity_samples - 1);
  double best_dist = std::numeric_limits<double>::infinity();
  Eigen::Vector3d best_p = Eigen::Vector3d::Zero();
  for (int s = 0; s < cfg.validity_samples; ++s) {
    const Eigen::Vector3d p = forward_kinematics(arm, traj.positions(dt * static_cast<double>(s)));
    const double dist = (p - cfg.lever_tip).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best_p = p;
    }
  }
  if (best_dist >= cfg.contact_radius) {
    out.failure = FailureReason::kNoContact;
    return out;
  }

  const double dx = best_p.x() - cfg.lever_tip.x();
  const double dy = best_p.y() - cfg.lever_tip.y();
  out.roll = std::clamp(cfg.angle_gain * dx, -cfg.angle_clamp, cfg.angle_clamp);
  out.pitch = std::clamp(cfg.angle_gain * dy, -cfg.angle_clamp, cfg.angle_clamp);
  for (int w = 0; w < 2; ++w)
    out.waypoints[w] =
        forward_kinematics(arm, traj.positions(cfg.waypoint_fractions[static_cast<std::size_t>(w)] *
                                               cfg.duration));
  out.valid = true;
  return out;
}

}  // namespace

bool GapConfig::is_zero() const {
  if (release_delay != 0.0) return false;
  for (double o : joint_offsets)
    if (o != 0.0) return false;
  return true;
}

BallisticResult ballistic_landing(const Eigen::Vector3d& p0, const Eigen::Vector3d& v0,
                                  double gravity) {
  require(gravity > 0.0, "gravity must be positive");
  require(p0.z() >= 0.0, "release point below the ground plane");
  BallisticResult out;
  const double disc = v0.z() * v0.z() + 2.0 * gravity * p0.z();
  if (disc < 0.0) return out;  // unreachable for z0 >= 0; kept for the contract
  const double t = (v0.z() + std::sqrt(disc)) / gravity;
  if (t < 0.0) return out;
  out.valid = true;
  out.flight_time = t;
  out.landing = p0.head<2>() + v0.head<2>() * t;
  return out;
}

Evaluation eval_throw(const ArmModel& arm, const ThrowConfig& cfg, const GapConfig& gap,
                      const Genotype& genotype) {
  arm.check();
  cfg.check();
  gap.check(arm.joint_count);
  const int joints = arm.joint_count;
  require(genotype.values.size() == 2 * joints + 1, "throw genotype dimension mismatch");

  Evaluation out;
  TrajectorySet traj;
  traj.duration = lerp(cfg.duration_min, cfg.duration_max, genotype.values[2 * joints]);
  traj.offsets = gap.is_zero() ? std::vector<double>{} : gap.joint_offsets;
  traj.joints.reserve(static_cast<std::size_t>(joints));
  for (int j = 0; j < joints; ++j) {
    const double qf = lerp(-arm.position_limit, arm.position_limit, genotype.values[j]);
    const double vf = lerp(-arm.velocity_limit, arm.velocity_limit, genotype.values[joints + j]);
    traj.joints.push_back(CubicTrajectory::fit(arm.home_pose[static_cast<std::size_t>(j)], 0.0,
                                               qf, vf, traj.duration));
  }

  out.failure = check_validity(arm, traj, cfg.validity_samples);
  if (out.failure != FailureReason::kNone) return out;

  // Release: the same cubic extended through any configured delay.
  const double t_release = traj.duration + gap.release_delay;
  const Eigen::Vector3d p_release = forward_kinematics(arm, traj.positions(t_release));
  if (p_release.z() <= 0.0) {
    out.failure = FailureReason::kGroundCollision;
    return out;
  }
  const auto gripper = [&](double t) { return forward_kinematics(arm, traj.positions(t)); };
  const Eigen::Vector3d v_release = finite_difference_velocity(gripper, t_release, t_release);

  const BallisticResult flight = ballistic_landing(p_release, v_release, cfg.gravity);
  if (!flight.valid) {
    out.failure = FailureReason::kNoLanding;
    return out;
  }

  Behavior behavior;
  behavior.values.resize(11);
  behavior.values[0] = flight.landing.x();
  behavior.values[1] = flight.landing.y();
  for (int w = 0; w < 3; ++w) {
    const Eigen::Vector3d p =
        gripper(cfg.waypoint_fractions[static_cast<std::size_t>(w)] * traj.duration);
    behavior.values.segment<3>(2 + 3 * w) = p;
  }

  // Effort proxy: mean joint-space acceleration magnitude over the samples.
  const double dt = traj.duration / static_cast<double>(cfg.validity_samples - 1);
  double effort = 0.0;
  for (int s = 0; s < cfg.validity_samples; ++s) {
    double acc2 = 0.0;
    for (int j = 0; j < joints; ++j) {
      const double a = traj.joints[static_cast<std::size_t>(j)].acceleration(
          dt * static_cast<double>(s));
      acc2 += a * a;
    }
    effort += std::sqrt(acc2);
  }
  effort /= static_cast<double>(cfg.validity_samples);

  out.valid = true;
  out.behavior = std::move(behavior);
  out.quality = -effort;
  return out;
}

Evaluation eval_lever(const ArmModel& arm, const LeverConfig& cfg, const GapConfig& gap,
                      const Genotype& genotype) {
  arm.check();
  cfg.check();
  gap.check(arm.joint_count);
  const int joints = arm.joint_count;
  require(genotype.values.size() == 2 * joints, "lever genotype dimension mismatch");

  Evaluation out;
  const LeverCore core = lever_core(arm, cfg, gap, genotype);
  if (!core.valid) {
    out.failure = core.failure;
    return out;
  }

  Behavior behavior;
  behavior.values.resize(8);
  behavior.values[0] = core.roll;
  behavior.values[1] = core.pitch;
  behavior.values.segment<3>(2) = core.waypoints[0];
  behavior.values.segment<3>(5) = core.waypoints[1];

  // Robustness quality: spread of the lever angles under small genotype
  // perturbations. The noise stream is derived from the genotype itself so
  // evaluations stay pure.
  const int n = genotype.dim();
  Rng noise_rng(fnv1a64(genotype.values.data(),
                        static_cast<std::size_t>(n) * sizeof(double)));
  const int replicas = cfg.robustness_replicas;
  std::vector<double> rolls(static_cast<std::size_t>(replicas), 0.0);
  std::vector<double> pitches(static_cast<std::size_t>(replicas), 0.0);
  for (int r = 0; r < replicas; ++r) {
    Genotype noisy = genotype;
    for (int d = 0; d < n; ++d) {
      const double delta = uniform_in(noise_rng, -cfg.robustness_noise, cfg.robustness_noise);
      noisy.values[d] = std::clamp(noisy.values[d] + delta, 0.0, 1.0);
    }
    const LeverCore rc = lever_core(arm, cfg, gap, noisy);
    if (rc.valid) {
      rolls[static_cast<std::size_t>(r)] = rc.roll;
      pitches[static_cast<std::size_t>(r)] = rc.pitch;
    }
    // replicas that lose contact or validity contribute (0, 0)
  }
  const auto sample_std = [&](const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double m2 = 0.0;
    for (double x : xs) m2 += (x - mean) * (x - mean);
    return std::sqrt(m2 / static_cast<double>(xs.size() - 1));
  };

  out.valid = true;
  out.behavior = std::move(behavior);
  out.quality = -0.5 * (sample_std(rolls) + sample_std(pitches));
  return out;
}

ThrowDomain::ThrowDomain(ArmModel arm, ThrowConfig cfg, GapConfig gap)
    : arm_(std::move(arm)), cfg_(cfg), gap_(std::move(gap)) {
  arm_.check();
  cfg_.check();
  gap_.check(arm_.joint_count);
  bounds_ = throw_bounds(arm_, cfg_);
}

LeverDomain::LeverDomain(ArmModel arm, LeverConfig cfg, GapConfig gap)
    : arm_(std::move(arm)), cfg_(cfg), gap_(std::move(gap)) {
  arm_.check();
  cfg_.check();
  gap_.check(arm_.joint_count);
  bounds_ = lever_bounds(arm_, cfg_);
}

}  // namespace qdreach
