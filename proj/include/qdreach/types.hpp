#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "qdreach/common.hpp"

namespace qdreach {

using Vec = Eigen::VectorXd;

// Normalized action parameters; every dimension lives in [0, 1]. Domains own
// the affine map to physical quantities.
struct Genotype {
  Vec values;

  int dim() const { return static_cast<int>(values.size()); }
};

// Axis-aligned box used to normalize behavior coordinates before any
// distance computation, so that meter-valued and radian-valued dimensions
// weigh equally.
struct BehaviorBounds {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }

  void check() const {
    require(lo.size() == hi.size(), "behavior bounds lo/hi dimension mismatch");
    for (int d = 0; d < lo.size(); ++d)
      require(lo[d] < hi[d], "behavior bounds must have positive width");
  }

  double normalize(double value, int d) const { return (value - lo[d]) / (hi[d] - lo[d]); }
  double denormalize(double unit, int d) const { return lo[d] + unit * (hi[d] - lo[d]); }
};

// Observed outcome of an action, in physical units. Which coordinates form
// the task-facing control subspace is a per-domain constant and travels with
// the repertoire rather than with every sample.
struct Behavior {
  Vec values;

  int dim() const { return static_cast<int>(values.size()); }
};

struct Individual {
  std::int64_t id = -1;
  Genotype genotype;
  Behavior behavior;       // as simulated when the individual entered the archive
  double quality = 0.0;
  double novelty = 0.0;    // refreshed once per generation during search
  Vec compensation;        // accumulated correction applied on top of `behavior`

  // The expected real-world outcome: simulated behavior plus everything the
  // archive has learned about the gap so far.
  Vec compensated() const { return behavior.values + compensation; }
};

enum class FailureReason {
  kNone,
  kJointLimit,
  kVelocityLimit,
  kGroundCollision,
  kNoContact,
  kNoLanding,
};

const char* to_string(FailureReason reason);

struct Evaluation {
  bool valid = false;
  Behavior behavior;   // meaningful only when valid
  double quality = 0.0;
  FailureReason failure = FailureReason::kNone;
};

}  // namespace qdreach
