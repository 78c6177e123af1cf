#pragma once

#include <Eigen/Core>

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "qdreach/arm.hpp"
#include "qdreach/domain.hpp"
#include "qdreach/types.hpp"

namespace qdreach {

// Evaluator mis-configuration emulating a reality gap: constant offsets on
// the commanded joint positions, plus an optional delay before the gripper
// releases the ball (throw only).
struct GapConfig {
  std::vector<double> joint_offsets;  // radians, length J (empty = zero gap)
  double release_delay = 0.0;         // seconds

  void check(int joint_count) const {
    require(joint_offsets.empty() ||
                static_cast<int>(joint_offsets.size()) == joint_count,
            "joint offset per joint required");
    require(release_delay >= 0.0, "release delay must be non-negative");
  }

  bool is_zero() const;
};

struct ThrowConfig {
  double duration_min = 0.3;  // s
  double duration_max = 2.0;
  double gravity = 9.81;
  double landing_bound = 2.5;  // |x|,|y| normalization range for landings, m
  int validity_samples = 100;
  std::array<double, 3> waypoint_fractions{0.25, 0.5, 0.75};
  double l_repertoire = 0.01;     // normalized insertion threshold
  double success_tolerance = 0.05;  // m on the landing point

  void check() const {
    require(duration_min > 0.0 && duration_max > duration_min, "bad duration range");
    require(gravity > 0.0, "gravity must be positive");
    require(landing_bound > 0.0, "landing bound must be positive");
    require(validity_samples >= 2, "validity sampling needs at least two samples");
    require(l_repertoire > 0.0 && success_tolerance > 0.0, "thresholds must be positive");
  }
};

struct LeverConfig {
  double duration = 3.0;  // s, fixed motion time
  Eigen::Vector3d lever_tip{0.9, 0.2, 1.0};
  double contact_radius = 0.08;  // m
  double angle_gain = 6.0;       // rad per meter of horizontal displacement
  double angle_clamp = 0.6;      // rad
  int validity_samples = 100;
  int robustness_replicas = 10;
  double robustness_noise = 0.01;
  std::array<double, 2> waypoint_fractions{1.0 / 3.0, 2.0 / 3.0};
  double l_repertoire = 0.05;
  double success_tolerance = 0.17453292519943295;  // 10 degrees, on the angles

  void check() const {
    require(duration > 0.0, "duration must be positive");
    require(contact_radius > 0.0, "contact radius must be positive");
    require(angle_gain > 0.0 && angle_clamp > 0.0, "angle model parameters must be positive");
    require(validity_samples >= 2, "validity sampling needs at least two samples");
    require(robustness_replicas >= 1, "at least one robustness replica");
    require(robustness_noise >= 0.0, "noise bound must be non-negative");
    require(l_repertoire > 0.0 && success_tolerance > 0.0, "thresholds must be positive");
  }
};

// (landing point, flight time); valid=false means no touchdown exists, which
// cannot happen for positive gravity and a start above the plane.
struct BallisticResult {
  bool valid = false;
  Eigen::Vector2d landing{0.0, 0.0};
  double flight_time = 0.0;
};

BallisticResult ballistic_landing(const Eigen::Vector3d& p0, const Eigen::Vector3d& v0,
                                  double gravity);

Evaluation eval_throw(const ArmModel& arm, const ThrowConfig& cfg, const GapConfig& gap,
                      const Genotype& genotype);
Evaluation eval_lever(const ArmModel& arm, const LeverConfig& cfg, const GapConfig& gap,
                      const Genotype& genotype);

// Domain adapters over the evaluation functions.
class ThrowDomain : public Domain {
 public:
  ThrowDomain(ArmModel arm, ThrowConfig cfg, GapConfig gap);

  const std::string& name() const override { return name_; }
  int genotype_dim() const override { return 2 * arm_.joint_count + 1; }
  int behavior_dim() const override { return 2 + 3 * 3; }
  const std::vector<int>& control_dims() const override { return control_dims_; }
  const BehaviorBounds& behavior_bounds() const override { return bounds_; }
  double default_l_repertoire() const override { return cfg_.l_repertoire; }
  double success_tolerance() const override { return cfg_.success_tolerance; }
  Evaluation evaluate(const Genotype& genotype) const override {
    return eval_throw(arm_, cfg_, gap_, genotype);
  }

  const ArmModel& arm() const { return arm_; }
  const ThrowConfig& config() const { return cfg_; }
  const GapConfig& gap() const { return gap_; }

 private:
  std::string name_ = "throw";
  ArmModel arm_;
  ThrowConfig cfg_;
  GapConfig gap_;
  std::vector<int> control_dims_{0, 1};
  BehaviorBounds bounds_;
};

class LeverDomain : public Domain {
 public:
  LeverDomain(ArmModel arm, LeverConfig cfg, GapConfig gap);

  const std::string& name() const override { return name_; }
  int genotype_dim() const override { return 2 * arm_.joint_count; }
  int behavior_dim() const override { return 2 + 2 * 3; }
  const std::vector<int>& control_dims() const override { return control_dims_; }
  const BehaviorBounds& behavior_bounds() const override { return bounds_; }
  double default_l_repertoire() const override { return cfg_.l_repertoire; }
  double success_tolerance() const override { return cfg_.success_tolerance; }
  Evaluation evaluate(const Genotype& genotype) const override {
    return eval_lever(arm_, cfg_, gap_, genotype);
  }

  const ArmModel& arm() const { return arm_; }
  const LeverConfig& config() const { return cfg_; }
  const GapConfig& gap() const { return gap_; }

 private:
  std::string name_ = "lever";
  ArmModel arm_;
  LeverConfig cfg_;
  GapConfig gap_;
  std::vector<int> control_dims_{0, 1};
  BehaviorBounds bounds_;
};

}  // namespace qdreach
