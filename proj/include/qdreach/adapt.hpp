#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qdreach/domain.hpp"
#include "qdreach/repertoire.hpp"

namespace qdreach {

struct JacobianConfig {
  int neighbor_count = 30;        // K
  double neighbor_radius = 0.4;   // genotype-space radius
  double eta_threshold = 0.3;     // residual cutoff, normalized behavior units
  double ridge = 1e-6;            // Tikhonov term on G Gᵀ
  double svd_cutoff = 1e-8;       // relative singular-value cutoff for the pseudo-inverse
  int max_iterations = -1;        // <0: 4 for reach, 5 for gap crossing
  double tolerance = -1.0;        // <0: the domain's success tolerance; physical units

  void check() const {
    require(neighbor_count >= 1, "neighbor count must be positive");
    require(neighbor_radius > 0.0, "neighbor radius must be positive");
    require(eta_threshold > 0.0, "residual threshold must be positive");
    require(ridge >= 0.0 && svd_cutoff >= 0.0, "regularization terms must be non-negative");
  }

  int resolve_iterations(bool gap_crossing) const {
    return max_iterations >= 0 ? max_iterations : (gap_crossing ? 5 : 4);
  }
  double resolve_tolerance(const Domain& domain) const {
    return tolerance >= 0.0 ? tolerance : domain.success_tolerance();
  }
};

struct JacobianEstimate {
  bool ok = false;  // false: fewer than n+1 neighbors, nothing else is meaningful
  Eigen::MatrixXd jacobian;  // control dims × n, normalized behavior per genotype unit
  double residual = 0.0;     // mean Frobenius residual of the local fit
  double confidence = 0.0;   // λ ∈ [0,1]
  std::vector<std::int64_t> neighbor_ids;
};

// Local least-squares linearization of the genotype→control-behavior map
// around (g_c, b_c), built from archived neighbors with compensated
// behaviors. b_c is the physical control-dim behavior at g_c.
JacobianEstimate estimate_jacobian(const Repertoire& repertoire, const Vec& g_c,
                                   const Vec& b_c, const JacobianConfig& cfg);

enum class AdaptStatus {
  kConverged,
  kMaxIterations,
  kNoNeighbors,
  kInvalidAction,
  kZeroConfidence,
};

const char* to_string(AdaptStatus status);

struct AdaptStep {
  Vec genotype;
  Vec behavior;      // control dims, physical units
  double error;      // distance to target, physical units
  double confidence; // λ used to produce the NEXT iterate (0 for the last step)
};

struct AdaptTrace {
  std::vector<AdaptStep> steps;  // non-empty; steps[0] is the starting action
  AdaptStatus status = AdaptStatus::kMaxIterations;
  Vec failed_genotype;  // attempted iterate when status = kInvalidAction

  int iterations() const { return static_cast<int>(steps.size()) - 1; }
  const AdaptStep& final_step() const { return steps.back(); }
};

// Intra-domain goal reaching: start from the archived action nearest to
// `target` (control dims) and descend the local linear model against
// `evaluator`. Returns the best genotype found and the full trace.
std::pair<Genotype, AdaptTrace> reach(const Repertoire& repertoire, const Vec& target,
                                      const Domain& evaluator, const JacobianConfig& cfg);

// Reality-gap crossing for one action: evaluate g_a on the gap-injected
// evaluator, then descend toward the expected behavior b_d. The Jacobian
// still comes from the simulation-built repertoire.
std::pair<Genotype, AdaptTrace> cross_gap(const Repertoire& repertoire, const Genotype& g_a,
                                          const Vec& b_d, const Domain& real_evaluator,
                                          const JacobianConfig& cfg);

// Propagates one observed trial through the archive: every individual's
// compensation moves toward the observation with Gaussian genotype-distance
// weights w_i = exp(-0.5 λ ‖g_i - g_a‖²). A genotype not yet archived is
// first inserted with its observed behavior. `literal_sign` reproduces the
// as-published update direction (see tests). Returns how many compensation
// vectors changed.
int update_repertoire(Repertoire& repertoire, const Genotype& g_a, const Behavior& observed,
                      double observed_quality, double lambda, bool literal_sign = false);

}  // namespace qdreach
