#include "qdreach/adapt.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qdreach {

namespace {

// Piecewise-linear confidence: full trust at zero residual, none at or above
// the threshold.
double confidence_from_residual(double eta, double threshold) {
  if (eta < threshold) return 1.0 - eta / threshold;
  return 0.0;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double relative_cutoff) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return Eigen::MatrixXd::Zero(m.cols(), m.rows());
  const double cutoff = relative_cutoff * sv(0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff && sv(i) > 0.0) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Vec control_subvector(const Repertoire& rep, const Vec& full) {
  const auto& dims = rep.control_dims();
  Vec out(static_cast<Eigen::Index>(dims.size()));
  for (std::size_t i = 0; i < dims.size(); ++i) out[static_cast<Eigen::Index>(i)] = full[dims[i]];
  return out;
}

// Normalize a physical control-dim vector with the repertoire bounds.
Vec normalize_control(const Repertoire& rep, const Vec& control) {
  const auto& dims = rep.control_dims();
  Vec out(control.size());
  for (std::size_t i = 0; i < dims.size(); ++i)
    out[static_cast<Eigen::Index>(i)] =
        rep.bounds().normalize(control[static_cast<Eigen::Index>(i)], dims[i]);
  return out;
}

JacobianEstimate estimate_with_fallback(const Repertoire& rep, const Vec& g, const Vec& b,
                                        const JacobianConfig& cfg) {
  JacobianEstimate est = estimate_jacobian(rep, g, b, cfg);
  if (est.ok) return est;
  // One widening retry before the trace gives up on this neighborhood.
  JacobianConfig wide = cfg;
  wide.neighbor_radius = 2.0 * cfg.neighbor_radius;
  return estimate_jacobian(rep, g, b, wide);
}

// Shared descent behind reach and cross_gap: damped Newton steps on the
// local linear model, always evaluated against `evaluator`.
AdaptTrace descend(const Repertoire& rep, Genotype g, Vec b_control, const Vec& target,
                   const Domain& evaluator, const JacobianConfig& cfg, bool gap_crossing) {
  const double tol = cfg.resolve_tolerance(evaluator);
  const int max_iterations = cfg.resolve_iterations(gap_crossing);

  AdaptTrace trace;
  trace.steps.push_back({g.values, b_control, (b_control - target).norm(), 0.0});

  while (true) {
    const AdaptStep& current = trace.steps.back();
    if (current.error <= tol) {
      trace.status = AdaptStatus::kConverged;
      return trace;
    }
    if (trace.iterations() >= max_iterations) {
      trace.status = AdaptStatus::kMaxIterations;
      return trace;
    }

    const JacobianEstimate est =
        estimate_with_fallback(rep, current.genotype, current.behavior, cfg);
    if (!est.ok) {
      trace.status = AdaptStatus::kNoNeighbors;
      return trace;
    }
    if (est.confidence == 0.0) {
      trace.status = AdaptStatus::kZeroConfidence;
      return trace;
    }
    trace.steps.back().confidence = est.confidence;

    // Work in normalized behavior units, matching the Jacobian.
    const Vec delta = normalize_control(rep, target) - normalize_control(rep, current.behavior);
    const Vec step = pseudo_inverse(est.jacobian, cfg.svd_cutoff) * delta;
    Vec g_next = current.genotype + est.confidence * step;
    for (Eigen::Index d = 0; d < g_next.size(); ++d)
      g_next[d] = std::clamp(g_next[d], 0.0, 1.0);

    const Evaluation ev = evaluator.evaluate(Genotype{g_next});
    if (!ev.valid) {
      trace.status = AdaptStatus::kInvalidAction;
      trace.failed_genotype = g_next;
      return trace;
    }
    trace.steps.push_back({g_next, control_subvector(rep, ev.behavior.values),
                           (control_subvector(rep, ev.behavior.values) - target).norm(), 0.0});
  }
}

}  // namespace

const char* to_string(AdaptStatus status) {
  switch (status) {
    case AdaptStatus::kConverged: return "converged";
    case AdaptStatus::kMaxIterations: return "max_iterations";
    case AdaptStatus::kNoNeighbors: return "no_neighbors";
    case AdaptStatus::kInvalidAction: return "invalid_action";
    case AdaptStatus::kZeroConfidence: return "zero_confidence";
  }
  return "unknown";
}

JacobianEstimate estimate_jacobian(const Repertoire& rep, const Vec& g_c, const Vec& b_c,
                                   const JacobianConfig& cfg) {
  const int n = rep.genotype_dim();
  const auto& dims = rep.control_dims();
  require(g_c.size() == n, "genotype dimension mismatch");
  require(b_c.size() == static_cast<Eigen::Index>(dims.size()),
          "control behavior dimension mismatch");
  require(cfg.neighbor_count >= 1 && cfg.neighbor_radius > 0.0, "bad neighborhood settings");
  require(cfg.eta_threshold > 0.0, "residual threshold must be positive");

  JacobianEstimate est;
  const auto neighbors = rep.genotype_neighbors(g_c, cfg.neighbor_count, cfg.neighbor_radius);
  if (static_cast<int>(neighbors.size()) < n + 1) return est;  // underdetermined

  const int k = static_cast<int>(neighbors.size());
  const int c = static_cast<int>(dims.size());
  Eigen::MatrixXd g_deltas(n, k);
  Eigen::MatrixXd b_deltas(c, k);
  const Vec b_c_norm = normalize_control(rep, b_c);
  est.neighbor_ids.reserve(neighbors.size());
  for (int j = 0; j < k; ++j) {
    const Individual& ind = rep.at(neighbors[static_cast<std::size_t>(j)].first);
    est.neighbor_ids.push_back(ind.id);
    g_deltas.col(j) = ind.genotype.values - g_c;
    const Vec b_norm = normalize_control(rep, control_subvector(rep, ind.compensated()));
    b_deltas.col(j) = b_norm - b_c_norm;
  }

  // J = B Gᵀ (G Gᵀ + μI)⁻¹, solved through the normal equations.
  Eigen::MatrixXd gram = g_deltas * g_deltas.transpose();
  gram.diagonal().array() += cfg.ridge;
  est.jacobian = gram.ldlt().solve(g_deltas * b_deltas.transpose()).transpose();

  est.residual =
      (est.jacobian * g_deltas - b_deltas).norm() / static_cast<double>(k);
  est.confidence = confidence_from_residual(est.residual, cfg.eta_threshold);
  est.ok = true;
  return est;
}

std::pair<Genotype, AdaptTrace> reach(const Repertoire& rep, const Vec& target,
                                      const Domain& evaluator, const JacobianConfig& cfg) {
  require(!rep.empty(), "reach needs a non-empty repertoire");
  require(target.size() == static_cast<Eigen::Index>(rep.control_dims().size()),
          "target dimension mismatch");

  const auto nearest = rep.nearest_behavior(target, 1, /*control_only=*/true);
  const Individual& start = rep.at(nearest.front().first);
  const Vec b0 = control_subvector(rep, start.compensated());

  AdaptTrace trace = descend(rep, start.genotype, b0, target, evaluator, cfg,
                             /*gap_crossing=*/false);
  return {Genotype{trace.final_step().genotype}, std::move(trace)};
}

std::pair<Genotype, AdaptTrace> cross_gap(const Repertoire& rep, const Genotype& g_a,
                                          const Vec& b_d, const Domain& real_evaluator,
                                          const JacobianConfig& cfg) {
  require(!rep.empty(), "gap crossing needs a non-empty repertoire");
  require(b_d.size() == static_cast<Eigen::Index>(rep.control_dims().size()),
          "target dimension mismatch");

  const Evaluation ev = real_evaluator.evaluate(g_a);
  require(ev.valid, "gap crossing requires a valid initial action");
  const Vec b_a = control_subvector(rep, ev.behavior.values);

  AdaptTrace trace =
      descend(rep, g_a, b_a, b_d, real_evaluator, cfg, /*gap_crossing=*/true);
  return {Genotype{trace.final_step().genotype}, std::move(trace)};
}

int update_repertoire(Repertoire& rep, const Genotype& g_a, const Behavior& observed,
                      double observed_quality, double lambda, bool literal_sign) {
  require(lambda >= 0.0 && lambda <= 1.0, "lambda outside [0,1]");
  require(g_a.values.size() == rep.genotype_dim(), "genotype dimension mismatch");
  require(observed.values.size() == rep.behavior_dim(), "behavior dimension mismatch");
  if (lambda == 0.0) return 0;

  if (rep.index_of_genotype(g_a.values) < 0)
    rep.add_observation(g_a, observed, observed_quality);

  const auto& dims = rep.control_dims();
  const int size = rep.size();

  // Snapshot the expectations first: every weight applies to the pre-update
  // state even though compensations mutate in place below.
  std::vector<double> weights(static_cast<std::size_t>(size));
  std::vector<Vec> expectations(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) {
    const Individual& ind = rep.at(i);
    const double d2 = (ind.genotype.values - g_a.values).squaredNorm();
    weights[static_cast<std::size_t>(i)] = std::exp(-0.5 * lambda * d2);
    expectations[static_cast<std::size_t>(i)] = ind.compensated();
  }

  int changed = 0;
  Vec delta = Vec::Zero(rep.behavior_dim());
  for (int i = 0; i < size; ++i) {
    const double w = weights[static_cast<std::size_t>(i)];
    const Vec& expectation = expectations[static_cast<std::size_t>(i)];
    bool any = false;
    delta.setZero();
    for (int d : dims) {
      const double toward = observed.values[d] - expectation[d];
      delta[d] = w * (literal_sign ? -toward : toward);
      if (delta[d] != 0.0 &&
          rep.at(i).compensation[d] + delta[d] != rep.at(i).compensation[d])
        any = true;
    }
    if (any) {
      rep.add_compensation(i, delta);
      ++changed;
    }
  }
  return changed;
}

}  // namespace qdreach
