#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qdreach/types.hpp"

namespace qdreach {

// A deterministic mapping from normalized action parameters to an observed
// behavior. "Simulation" and "reality" are both instances of this interface;
// a reality-gap study simply pairs two evaluators built from the same model
// with different gap settings.
class Domain {
 public:
  virtual ~Domain() = default;

  virtual const std::string& name() const = 0;
  virtual int genotype_dim() const = 0;
  virtual int behavior_dim() const = 0;
  virtual const std::vector<int>& control_dims() const = 0;
  virtual const BehaviorBounds& behavior_bounds() const = 0;

  // Insertion threshold in normalized behavior units.
  virtual double default_l_repertoire() const = 0;

  // Task success tolerance in physical control-dim units (meters or radians).
  virtual double success_tolerance() const = 0;

  virtual Evaluation evaluate(const Genotype& genotype) const = 0;
};

}  // namespace qdreach
