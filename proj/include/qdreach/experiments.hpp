#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qdreach/adapt.hpp"
#include "qdreach/domain.hpp"
#include "qdreach/repertoire.hpp"

namespace qdreach {

// Uniform targets over the bounding box of the archived control-dim
// behaviors. Draws farther than 3 l from every archived behavior (normalized)
// are rejected so every target has at least a remote starting point.
std::vector<Vec> sample_reach_targets(const Repertoire& repertoire, int count,
                                      std::uint64_t seed);

struct ReachTrial {
  Vec target;            // control dims, physical units
  double initial_error;  // from the nearest archived action
  double final_error;
  int iterations;
  AdaptStatus status;
  AdaptTrace trace;
};

ReachTrial run_reach_trial(const Repertoire& repertoire, const Domain& evaluator,
                           const Vec& target, const JacobianConfig& cfg);

void write_reach_csv(std::ostream& out, const std::vector<ReachTrial>& trials);

// One gap-crossing attempt per sampled archive action (drawn without
// replacement). `category` buckets the outcome for the histogram:
// no_adaptation_needed, converged_<k>, approached_not_converged, or
// failed_<reason>.
struct GapTrial {
  std::int64_t action_id = -1;
  double initial_error = 0.0;  // NaN when the action is invalid under the gap
  double final_error = 0.0;
  int iterations = 0;
  AdaptStatus status = AdaptStatus::kMaxIterations;
  std::string category;
};

struct GapSimResult {
  std::vector<GapTrial> trials;
  std::vector<std::pair<std::string, int>> histogram() const;  // sorted by category
};

GapSimResult run_gapsim(const Repertoire& repertoire, const Domain& real_evaluator, int count,
                        std::uint64_t seed, const JacobianConfig& cfg);

void write_gapsim_csv(std::ostream& out, const GapSimResult& result);
void write_histogram_csv(std::ostream& out,
                         const std::vector<std::pair<std::string, int>>& histogram);

// Error of the archive's expectations against the real evaluator, tracked
// over a sequence of trials. `mean_error` averages the control-dim distance
// between expected and real behavior across the original archive members
// that remain valid for real; `failing_ratio` counts members that are invalid
// or off by more than the tolerance.
struct UpdatePoint {
  int trial = 0;
  double mean_error = 0.0;
  double failing_ratio = 0.0;
};

struct UpdateStudyResult {
  std::vector<UpdatePoint> full;         // weighted updates over the whole archive
  std::vector<UpdatePoint> action_only;  // only the tested action is corrected
};

// Runs the same trial sequence twice from copies of `repertoire`: once with
// full weighted updates fed by every observation of the gap-crossing process,
// once correcting only the tested action. Point 0 is the state before any
// trial.
UpdateStudyResult run_update_study(const Repertoire& repertoire, const Domain& real_evaluator,
                                   int trials, std::uint64_t seed, const JacobianConfig& cfg);

void write_update_csv(std::ostream& out, const UpdateStudyResult& result);

}  // namespace qdreach
