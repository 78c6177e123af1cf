#include "qdreach/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "qdreach/common.hpp"
#include "qdreach/io.hpp"

namespace qdreach {
namespace {

Vec control_subvector(const Repertoire& rep, const Vec& full) {
  const auto& dims = rep.control_dims();
  Vec out(static_cast<Eigen::Index>(dims.size()));
  for (std::size_t i = 0; i < dims.size(); ++i) out[static_cast<Eigen::Index>(i)] = full[dims[i]];
  return out;
}

// Deterministic Fisher-Yates permutation of 0..n-1 driven by uniform01, so
// trial sequences are identical across standard libraries for a given seed.
std::vector<int> shuffled_indices(int n, Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    auto j = static_cast<std::size_t>(uniform01(rng) * (i + 1));
    if (j > static_cast<std::size_t>(i)) j = static_cast<std::size_t>(i);
    std::swap(order[static_cast<std::size_t>(i)], order[j]);
  }
  return order;
}

// Same widening retry the descent loop applies before reporting no_neighbors.
JacobianEstimate estimate_loose(const Repertoire& rep, const Vec& g, const Vec& b_control,
                                const JacobianConfig& cfg) {
  JacobianEstimate est = estimate_jacobian(rep, g, b_control, cfg);
  if (est.ok) return est;
  JacobianConfig wide = cfg;
  wide.neighbor_radius = 2.0 * cfg.neighbor_radius;
  return estimate_jacobian(rep, g, b_control, wide);
}

std::string failure_suffix(AdaptStatus status) {
  switch (status) {
    case AdaptStatus::kMaxIterations: return "not_approached";
    case AdaptStatus::kNoNeighbors: return "no_neighbors";
    case AdaptStatus::kInvalidAction: return "invalid_action";
    case AdaptStatus::kZeroConfidence: return "zero_confidence";
    case AdaptStatus::kConverged: break;
  }
  return "unknown";
}

}  // namespace

std::vector<Vec> sample_reach_targets(const Repertoire& rep, int count, std::uint64_t seed) {
  require(!rep.empty(), "target sampling needs a non-empty repertoire");
  require(count >= 0, "target count must be non-negative");
  const auto& dims = rep.control_dims();
  const auto c = static_cast<Eigen::Index>(dims.size());

  Vec lo = Vec::Constant(c, std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  for (const Individual& ind : rep.individuals()) {
    const Vec b = control_subvector(rep, ind.compensated());
    lo = lo.cwiseMin(b);
    hi = hi.cwiseMax(b);
  }

  Rng rng(seed);
  const double reject_radius = 3.0 * rep.l_repertoire();
  std::vector<Vec> targets;
  targets.reserve(static_cast<std::size_t>(count));
  std::int64_t attempts = 0;
  const std::int64_t max_attempts = 10000LL * std::max(count, 1);
  while (static_cast<int>(targets.size()) < count) {
    require(attempts++ < max_attempts, "target sampling kept rejecting; archive too sparse");
    Vec t(c);
    for (Eigen::Index d = 0; d < c; ++d) t[d] = uniform_in(rng, lo[d], hi[d]);
    const auto nearest = rep.nearest_behavior(t, 1, /*control_only=*/true);
    if (nearest.front().second <= reject_radius) targets.push_back(std::move(t));
  }
  return targets;
}

ReachTrial run_reach_trial(const Repertoire& rep, const Domain& evaluator, const Vec& target,
                           const JacobianConfig& cfg) {
  auto [genotype, trace] = reach(rep, target, evaluator, cfg);
  (void)genotype;
  ReachTrial trial;
  trial.target = target;
  trial.initial_error = trace.steps.front().error;
  trial.final_error = trace.final_step().error;
  trial.iterations = trace.iterations();
  trial.status = trace.status;
  trial.trace = std::move(trace);
  return trial;
}

void write_reach_csv(std::ostream& out, const std::vector<ReachTrial>& trials) {
  const Eigen::Index c = trials.empty() ? 0 : trials.front().target.size();
  for (Eigen::Index d = 0; d < c; ++d) out << "target_" << d << ',';
  out << "initial_error,final_error,iterations,status\n";
  for (const ReachTrial& t : trials) {
    for (Eigen::Index d = 0; d < c; ++d) out << format_double(t.target[d]) << ',';
    out << format_double(t.initial_error) << ',' << format_double(t.final_error) << ','
        << t.iterations << ',' << to_string(t.status) << '\n';
  }
}

std::vector<std::pair<std::string, int>> GapSimResult::histogram() const {
  std::map<std::string, int> counts;
  for (const GapTrial& t : trials) ++counts[t.category];
  return {counts.begin(), counts.end()};
}

GapSimResult run_gapsim(const Repertoire& rep, const Domain& real_evaluator, int count,
                        std::uint64_t seed, const JacobianConfig& cfg) {
  require(!rep.empty(), "gap study needs a non-empty repertoire");
  require(count >= 1, "at least one trial");
  const double tol = cfg.resolve_tolerance(real_evaluator);

  Rng rng(seed);
  std::vector<int> order = shuffled_indices(rep.size(), rng);
  if (count < rep.size()) order.resize(static_cast<std::size_t>(count));

  GapSimResult result;
  result.trials.reserve(order.size());
  for (int index : order) {
    const Individual& ind = rep.at(index);
    GapTrial trial;
    trial.action_id = ind.id;

    const Evaluation ev = real_evaluator.evaluate(ind.genotype);
    if (!ev.valid) {
      trial.initial_error = std::numeric_limits<double>::quiet_NaN();
      trial.final_error = trial.initial_error;
      trial.status = AdaptStatus::kInvalidAction;
      trial.category = "failed_invalid_initial";
      result.trials.push_back(std::move(trial));
      continue;
    }

    const Vec expected = control_subvector(rep, ind.compensated());
    trial.initial_error = (control_subvector(rep, ev.behavior.values) - expected).norm();
    if (trial.initial_error <= tol) {
      trial.final_error = trial.initial_error;
      trial.status = AdaptStatus::kConverged;
      trial.category = "no_adaptation_needed";
      result.trials.push_back(std::move(trial));
      continue;
    }

    auto [genotype, trace] = cross_gap(rep, ind.genotype, expected, real_evaluator, cfg);
    (void)genotype;
    trial.final_error = trace.final_step().error;
    trial.iterations = trace.iterations();
    trial.status = trace.status;
    if (trace.status == AdaptStatus::kConverged)
      trial.category = "converged_" + std::to_string(trial.iterations);
    else if (trial.final_error < trial.initial_error)
      trial.category = "approached_not_converged";
    else
      trial.category = "failed_" + failure_suffix(trace.status);
    result.trials.push_back(std::move(trial));
  }
  return result;
}

void write_gapsim_csv(std::ostream& out, const GapSimResult& result) {
  out << "action_id,initial_error,final_error,iterations,status,category\n";
  for (const GapTrial& t : result.trials) {
    out << t.action_id << ',' << format_double(t.initial_error) << ','
        << format_double(t.final_error) << ',' << t.iterations << ',' << to_string(t.status)
        << ',' << t.category << '\n';
  }
}

void write_histogram_csv(std::ostream& out,
                         const std::vector<std::pair<std::string, int>>& histogram) {
  out << "category,count\n";
  for (const auto& [category, count] : histogram) out << category << ',' << count << '\n';
}

namespace {

// Archive health against the real evaluator, measured over the members the
// study started with (later insertions are tools, not subjects).
UpdatePoint measure_update_point(const Repertoire& rep, int trial,
                                 const std::vector<Evaluation>& real_evals, double tol,
                                 const std::vector<int>& original_indices) {
  UpdatePoint point;
  point.trial = trial;
  double error_sum = 0.0;
  int valid = 0, failing = 0;
  for (int i : original_indices) {
    const Evaluation& ev = real_evals[static_cast<std::size_t>(i)];
    if (!ev.valid) {
      ++failing;
      continue;
    }
    const Vec expected = control_subvector(rep, rep.at(i).compensated());
    const double err = (control_subvector(rep, ev.behavior.values) - expected).norm();
    error_sum += err;
    ++valid;
    if (err > tol) ++failing;
  }
  point.mean_error = valid > 0 ? error_sum / valid : 0.0;
  point.failing_ratio =
      original_indices.empty() ? 0.0 : static_cast<double>(failing) / original_indices.size();
  return point;
}

std::vector<UpdatePoint> run_update_variant(const Repertoire& rep0, const Domain& real_evaluator,
                                            const std::vector<int>& order,
                                            const std::vector<Evaluation>& real_evals,
                                            const JacobianConfig& cfg, bool full_updates) {
  Repertoire rep = rep0;
  const double tol = cfg.resolve_tolerance(real_evaluator);
  std::vector<int> original_indices(static_cast<std::size_t>(rep0.size()));
  for (int i = 0; i < rep0.size(); ++i) original_indices[static_cast<std::size_t>(i)] = i;

  std::vector<UpdatePoint> curve;
  curve.reserve(order.size() + 1);
  curve.push_back(measure_update_point(rep, 0, real_evals, tol, original_indices));

  int trial = 0;
  for (int index : order) {
    ++trial;
    const Evaluation& ev = real_evals[static_cast<std::size_t>(index)];
    if (!ev.valid) {  // nothing observable from this action
      curve.push_back(measure_update_point(rep, trial, real_evals, tol, original_indices));
      continue;
    }

    const Genotype& g_a = rep.at(index).genotype;
    const Vec expected = control_subvector(rep, rep.at(index).compensated());
    const Vec observed = control_subvector(rep, ev.behavior.values);

    if (full_updates) {
      // Every genotype evaluated during the trial, in evaluation order. When
      // the expectation is already met the trial is the single test evaluation.
      std::vector<Genotype> evaluated;
      evaluated.push_back(g_a);
      if ((observed - expected).norm() > tol) {
        auto [genotype, trace] = cross_gap(rep, g_a, expected, real_evaluator, cfg);
        (void)genotype;
        for (std::size_t s = 1; s < trace.steps.size(); ++s)
          evaluated.push_back(Genotype{trace.steps[s].genotype});
      }

      for (const Genotype& g : evaluated) {
        const Evaluation obs = real_evaluator.evaluate(g);
        if (!obs.valid) continue;
        const JacobianEstimate est =
            estimate_loose(rep, g.values, control_subvector(rep, obs.behavior.values), cfg);
        const double lambda = est.ok ? est.confidence : 0.0;
        update_repertoire(rep, g, obs.behavior, obs.quality, lambda);
      }
    } else {
      const JacobianEstimate est = estimate_loose(rep, g_a.values, observed, cfg);
      if (est.ok && est.confidence > 0.0) {
        Vec delta = Vec::Zero(rep.behavior_dim());
        const auto& dims = rep.control_dims();
        const Vec current = control_subvector(rep, rep.at(index).compensated());
        for (std::size_t d = 0; d < dims.size(); ++d)
          delta[dims[d]] = observed[static_cast<Eigen::Index>(d)] -
                           current[static_cast<Eigen::Index>(d)];
        rep.add_compensation(index, delta);
      }
    }

    curve.push_back(measure_update_point(rep, trial, real_evals, tol, original_indices));
  }
  return curve;
}

}  // namespace

UpdateStudyResult run_update_study(const Repertoire& rep0, const Domain& real_evaluator,
                                   int trials, std::uint64_t seed, const JacobianConfig& cfg) {
  require(!rep0.empty(), "update study needs a non-empty repertoire");
  require(trials >= 1 && trials <= rep0.size(), "trials must be in [1, archive size]");

  // The real behavior of every original member is fixed; evaluating once up
  // front keeps the per-trial metric cheap and both variants consistent.
  std::vector<Evaluation> real_evals;
  real_evals.reserve(static_cast<std::size_t>(rep0.size()));
  for (const Individual& ind : rep0.individuals())
    real_evals.push_back(real_evaluator.evaluate(ind.genotype));

  Rng rng(seed);
  std::vector<int> order = shuffled_indices(rep0.size(), rng);
  order.resize(static_cast<std::size_t>(trials));

  UpdateStudyResult result;
  result.full = run_update_variant(rep0, real_evaluator, order, real_evals, cfg, true);
  result.action_only = run_update_variant(rep0, real_evaluator, order, real_evals, cfg, false);
  return result;
}

void write_update_csv(std::ostream& out, const UpdateStudyResult& result) {
  require(result.full.size() == result.action_only.size(), "variant curves must align");
  out << "trial,full_mean_error,full_failing_ratio,action_only_mean_error,"
         "action_only_failing_ratio\n";
  for (std::size_t i = 0; i < result.full.size(); ++i) {
    out << result.full[i].trial << ',' << format_double(result.full[i].mean_error) << ','
        << format_double(result.full[i].failing_ratio) << ','
        << format_double(result.action_only[i].mean_error) << ','
        << format_double(result.action_only[i].failing_ratio) << '\n';
  }
}

}  // namespace qdreach
