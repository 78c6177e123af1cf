#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qdreach/domain.hpp"
#include "qdreach/repertoire.hpp"

namespace qdreach {

struct QdConfig {
  int population_size = 240;
  int generations = 2000;
  double mutation_rate = 0.2;
  double crossover_rate = 0.1;
  double sbx_eta = 15.0;
  double mutation_eta = 20.0;
  double l_repertoire = -1.0;  // <= 0 selects the domain default
  double eps_q = 1e-3;
  std::uint64_t seed = 0;
  std::string rng_algorithm = kRngAlgorithm;
  int max_seeding_generations = 100;
  // Prose variant of the search: parents may also come from the previous
  // generation's valid offspring, not just the archive.
  bool select_from_population = false;
  // Restrict the novelty descriptor to the control subspace instead of the
  // full behavior.
  bool novelty_on_control_dims = false;

  void check() const;
};

struct GenerationRecord {
  int generation = 0;
  int archive_size = 0;
  double mean_quality = 0.0;
  std::int64_t evaluations_used = 0;
  int invalid_count = 0;
};

struct RunReport {
  std::vector<GenerationRecord> rows;
  std::int64_t seeding_evaluations = 0;
  int seeding_generations = 0;
  double wall_seconds = 0.0;
};

// The domain produced no valid action within the seeding cap.
struct initialization_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Novelty-archive QD search: seed with random populations until one valid
// action lands, then iterate novelty-proportional selection, SBX crossover,
// polynomial mutation, evaluation, and insertion, refreshing every archived
// novelty against archive + population once per generation.
std::pair<Repertoire, RunReport> run_qd(const QdConfig& config, const Domain& domain);

// Identical loop and budget accounting, but offspring are sampled uniformly
// at random; novelty bookkeeping is skipped since nothing consumes it.
std::pair<Repertoire, RunReport> run_random_baseline(const QdConfig& config,
                                                     const Domain& domain);

}  // namespace qdreach
