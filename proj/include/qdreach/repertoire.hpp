#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "qdreach/kernels.hpp"
#include "qdreach/types.hpp"

namespace qdreach {

struct InsertOutcome {
  enum Kind { kAdded, kReplaced, kRejected };
  Kind kind = kRejected;
  std::int64_t id = -1;           // id of the inserted individual (Added/Replaced)
  std::int64_t replaced_id = -1;  // previous occupant (Replaced only)
};

// Unstructured archive of valid behaviors. All behavior-space geometry runs
// in normalized coordinates over the compensated behaviors, so any learned
// gap correction immediately affects neighbor queries and insertion.
class Repertoire {
 public:
  Repertoire(int genotype_dim, int behavior_dim, std::vector<int> control_dims,
             BehaviorBounds bounds, double l_repertoire);

  int genotype_dim() const { return genotype_dim_; }
  int behavior_dim() const { return behavior_dim_; }
  int size() const { return static_cast<int>(individuals_.size()); }
  bool empty() const { return individuals_.empty(); }
  const std::vector<int>& control_dims() const { return control_dims_; }
  const BehaviorBounds& bounds() const { return bounds_; }
  double l_repertoire() const { return l_repertoire_; }
  std::int64_t next_id() const { return next_id_; }

  const Individual& at(int index) const { return individuals_.at(index); }
  const std::vector<Individual>& individuals() const { return individuals_; }
  int index_of_id(std::int64_t id) const;           // -1 when absent
  int index_of_genotype(const Vec& genotype) const; // exact match, -1 when absent

  // Normalized Euclidean distance between two full behavior vectors.
  double behavior_distance(const Vec& a, const Vec& b) const;

  // Distance from `behavior` (full, physical) to the nearest archived
  // compensated behavior. Requires a non-empty archive.
  double nearest_behavior_distance(const Vec& behavior) const;

  // Novelty-archive insertion: far enough from everyone -> Added; close to
  // the nearest occupant but better by more than eps_q -> Replaced (the
  // candidate inherits a fresh id); otherwise Rejected.
  InsertOutcome insert(const Genotype& genotype, const Behavior& behavior, double quality,
                       double eps_q);

  // Unconditional append used when real-world observations enter the archive.
  std::int64_t add_observation(const Genotype& genotype, const Behavior& behavior,
                               double quality);

  // k nearest archived behaviors to a physical target, by normalized
  // distance; `control_only` restricts both the target and the metric to the
  // control subspace. Ties break toward the lower id. Returns (index, distance).
  std::vector<std::pair<int, double>> nearest_behavior(const Vec& target, int k,
                                                       bool control_only) const;

  // Neighbors of `genotype` within `radius` (inclusive), excluding exact
  // genotype matches, closest first (ties toward lower id), at most `max_count`.
  std::vector<std::pair<int, double>> genotype_neighbors(const Vec& genotype, int max_count,
                                                         double radius) const;

  void set_novelty(int index, double novelty);

  // Adds `delta` (full behavior dimension) to the individual's compensation
  // and refreshes the cached normalized coordinates.
  void add_compensation(int index, const Vec& delta);

  // Column views for the density kernels: normalized compensated behaviors
  // (full or control subspace) and raw genotypes. Pointers stay valid until
  // the next mutating call.
  kernels::ColsView behavior_cols() const;
  kernels::ColsView control_cols() const;
  kernels::ColsView genotype_cols() const;

  // JSONL round-trip: one header line followed by one line per individual.
  void save(std::ostream& out) const;
  static Repertoire load(std::istream& in);

 private:
  void push_cols(const Individual& ind);
  void refresh_behavior_row(int index);
  std::vector<const double*> control_ptrs() const;

  int genotype_dim_;
  int behavior_dim_;
  std::vector<int> control_dims_;
  BehaviorBounds bounds_;
  double l_repertoire_;
  std::int64_t next_id_ = 0;

  std::vector<Individual> individuals_;
  // Column-major mirrors consumed by the SIMD kernels.
  std::vector<std::vector<double>> behavior_cols_;  // normalized compensated, one per dim
  std::vector<std::vector<double>> genotype_cols_;
  mutable std::vector<const double*> behavior_ptrs_;
  mutable std::vector<const double*> genotype_ptrs_;
  mutable std::vector<const double*> control_ptrs_;
};

}  // namespace qdreach
