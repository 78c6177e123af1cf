#include "qdreach/evolve.hpp"

#include <array>
#include <chrono>
#include <cmath>

#include "qdreach/novelty.hpp"
#include "qdreach/variation.hpp"

namespace qdreach {

namespace {

double mean_quality(const Repertoire& rep) {
  if (rep.empty()) return 0.0;
  double sum = 0.0;
  for (int i = 0; i < rep.size(); ++i) sum += rep.at(i).quality;
  return sum / static_cast<double>(rep.size());
}

// Per-dimension column store for the valid offspring that did not enter the
// archive this generation; they still belong to the novelty reference pool.
struct RejectedBlock {
  std::vector<std::vector<double>> cols;
  std::vector<const double*> ptrs;
  std::size_t count = 0;

  explicit RejectedBlock(std::size_t dim) : cols(dim) {}

  void push(const Vec& normalized_row) {
    for (std::size_t d = 0; d < cols.size(); ++d)
      cols[d].push_back(normalized_row[static_cast<Eigen::Index>(d)]);
    ++count;
  }

  kernels::ColsView view() {
    ptrs.resize(cols.size());
    for (std::size_t d = 0; d < cols.size(); ++d) ptrs[d] = cols[d].data();
    return {ptrs.data(), count, cols.size()};
  }
};

// Refreshes every archived novelty against archive + leftover population and
// returns the novelty of each rejected offspring as well (used by the
// population-selection variant).
std::vector<double> recompute_novelty(Repertoire& rep, RejectedBlock& rejected,
                                      bool control_dims_only) {
  const kernels::ColsView archive =
      control_dims_only ? rep.control_cols() : rep.behavior_cols();
  const std::size_t dim = archive.dim;

  std::array<kernels::ColsView, 2> segments{archive, rejected.view()};
  const std::size_t n_segments = rejected.count > 0 ? 2 : 1;
  const PoolView pool(segments.data(), n_segments);

  const double h = silverman_bandwidth(pool);

  std::vector<double> query(dim);
  for (int i = 0; i < rep.size(); ++i) {
    for (std::size_t d = 0; d < dim; ++d)
      query[d] = archive.cols[d][static_cast<std::size_t>(i)];
    rep.set_novelty(i, novelty(query.data(), pool, h));
  }

  std::vector<double> rejected_novelty(rejected.count);
  const kernels::ColsView rview = rejected.view();
  for (std::size_t i = 0; i < rejected.count; ++i) {
    for (std::size_t d = 0; d < dim; ++d) query[d] = rview.cols[d][i];
    rejected_novelty[i] = novelty(query.data(), pool, h);
  }
  return rejected_novelty;
}

std::pair<Repertoire, RunReport> run_loop(const QdConfig& config, const Domain& domain,
                                          bool random_offspring) {
  config.check();
  const auto t0 = std::chrono::steady_clock::now();

  const int n = domain.genotype_dim();
  const double l =
      config.l_repertoire > 0.0 ? config.l_repertoire : domain.default_l_repertoire();
  Repertoire rep(n, domain.behavior_dim(), domain.control_dims(), domain.behavior_bounds(),
                 l);
  RunReport report;
  Rng rng(config.seed);
  std::int64_t evaluations = 0;

  // Seeding: whole random populations until at least one valid action lands.
  while (rep.empty()) {
    if (report.seeding_generations >= config.max_seeding_generations)
      throw initialization_error("no valid action found within " +
                                 std::to_string(config.max_seeding_generations) +
                                 " seeding generations on domain " + domain.name());
    ++report.seeding_generations;
    for (int i = 0; i < config.population_size; ++i) {
      const Genotype g = random_genotype(n, rng);
      const Evaluation ev = domain.evaluate(g);
      ++evaluations;
      if (ev.valid) rep.insert(g, ev.behavior, ev.quality, config.eps_q);
    }
  }
  report.seeding_evaluations = evaluations;

  const std::size_t novelty_dim = config.novelty_on_control_dims
                                      ? rep.control_dims().size()
                                      : static_cast<std::size_t>(rep.behavior_dim());

  // Previous generation's valid-but-rejected offspring, kept only for the
  // population-selection variant.
  std::vector<Genotype> carry_genotypes;
  std::vector<double> carry_novelty;

  if (!random_offspring) {
    RejectedBlock empty(novelty_dim);
    recompute_novelty(rep, empty, config.novelty_on_control_dims);
  }

  for (int gen = 1; gen <= config.generations; ++gen) {
    std::vector<Genotype> offspring;
    offspring.reserve(static_cast<std::size_t>(config.population_size));

    if (random_offspring) {
      for (int i = 0; i < config.population_size; ++i)
        offspring.push_back(random_genotype(n, rng));
    } else {
      std::vector<Genotype> parents;
      if (config.select_from_population && !carry_genotypes.empty()) {
        // Pool = archive + previous population, all weighted by novelty.
        std::vector<double> novelties;
        novelties.reserve(static_cast<std::size_t>(rep.size()) + carry_novelty.size());
        for (int i = 0; i < rep.size(); ++i) novelties.push_back(rep.at(i).novelty);
        novelties.insert(novelties.end(), carry_novelty.begin(), carry_novelty.end());
        const std::vector<double> weights = novelty_weights(novelties);
        for (int i = 0; i < config.population_size; ++i) {
          const std::size_t pick = weighted_sample_index(weights, rng);
          parents.push_back(pick < static_cast<std::size_t>(rep.size())
                                ? rep.at(static_cast<int>(pick)).genotype
                                : carry_genotypes[pick - static_cast<std::size_t>(rep.size())]);
        }
      } else {
        parents = select_parents(rep, config.population_size, rng);
      }

      for (std::size_t i = 0; i + 1 < parents.size(); i += 2) {
        auto children = sbx_crossover(parents[i], parents[i + 1], config.crossover_rate,
                                      config.sbx_eta, rng);
        offspring.push_back(
            poly_mutation(children.first, config.mutation_rate, config.mutation_eta, rng));
        offspring.push_back(
            poly_mutation(children.second, config.mutation_rate, config.mutation_eta, rng));
      }
      if (parents.size() % 2 == 1) {
        auto children = sbx_crossover(parents.back(), parents.back(), config.crossover_rate,
                                      config.sbx_eta, rng);
        offspring.push_back(
            poly_mutation(children.first, config.mutation_rate, config.mutation_eta, rng));
      }
    }

    int invalid = 0;
    RejectedBlock rejected(novelty_dim);
    std::vector<Genotype> rejected_genotypes;
    for (const Genotype& g : offspring) {
      const Evaluation ev = domain.evaluate(g);
      ++evaluations;
      if (!ev.valid) {
        ++invalid;
        continue;
      }
      const InsertOutcome outcome = rep.insert(g, ev.behavior, ev.quality, config.eps_q);
      if (outcome.kind == InsertOutcome::kRejected) {
        Vec row(static_cast<Eigen::Index>(novelty_dim));
        if (config.novelty_on_control_dims) {
          const auto& dims = rep.control_dims();
          for (std::size_t d = 0; d < dims.size(); ++d)
            row[static_cast<Eigen::Index>(d)] =
                rep.bounds().normalize(ev.behavior.values[dims[d]], dims[d]);
        } else {
          for (int d = 0; d < rep.behavior_dim(); ++d)
            row[d] = rep.bounds().normalize(ev.behavior.values[d], d);
        }
        rejected.push(row);
        if (config.select_from_population) rejected_genotypes.push_back(g);
      }
    }

    if (!random_offspring) {
      std::vector<double> rejected_novelty =
          recompute_novelty(rep, rejected, config.novelty_on_control_dims);
      if (config.select_from_population) {
        carry_genotypes = std::move(rejected_genotypes);
        carry_novelty = std::move(rejected_novelty);
      }
    }

    report.rows.push_back({gen, rep.size(), mean_quality(rep), evaluations, invalid});
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(rep), std::move(report)};
}

}  // namespace

void QdConfig::check() const {
  require(population_size >= 2, "population size must be at least 2");
  require(generations >= 0, "generation count must be non-negative");
  require(mutation_rate >= 0.0 && mutation_rate <= 1.0, "mutation rate outside [0,1]");
  require(crossover_rate >= 0.0 && crossover_rate <= 1.0, "crossover rate outside [0,1]");
  require(sbx_eta > 0.0 && mutation_eta > 0.0, "distribution indices must be positive");
  require(eps_q >= 0.0, "eps_q must be non-negative");
  require(max_seeding_generations >= 1, "seeding cap must be positive");
}

std::pair<Repertoire, RunReport> run_qd(const QdConfig& config, const Domain& domain) {
  return run_loop(config, domain, /*random_offspring=*/false);
}

std::pair<Repertoire, RunReport> run_random_baseline(const QdConfig& config,
                                                     const Domain& domain) {
  return run_loop(config, domain, /*random_offspring=*/true);
}

}  // namespace qdreach
