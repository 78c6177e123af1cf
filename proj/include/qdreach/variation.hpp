#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qdreach/repertoire.hpp"
#include "qdreach/types.hpp"

namespace qdreach {

// Draws an index with probability proportional to its weight. Weights must be
// non-negative with a positive total; zero-weight entries are never drawn.
std::size_t weighted_sample_index(std::span<const double> weights, Rng& rng);

// Selection weights from raw novelty scores: shifted so the minimum maps to a
// small positive floor, keeping the proportional draw well defined when
// novelties go non-positive.
std::vector<double> novelty_weights(std::span<const double> novelties);

Genotype random_genotype(int dim, Rng& rng);

// `count` genotypes drawn with replacement, proportional to novelty. If the
// archive holds fewer individuals than `count`, the shortfall is filled with
// uniform-random genotypes.
std::vector<Genotype> select_parents(const Repertoire& repertoire, int count, Rng& rng);

// Simulated binary crossover on the unit box, applied gene-wise with
// probability `crossover_rate`.
std::pair<Genotype, Genotype> sbx_crossover(const Genotype& p1, const Genotype& p2,
                                            double crossover_rate, double eta_c, Rng& rng);

// Bounded polynomial mutation on the unit box, applied gene-wise with
// probability `mutation_rate`.
Genotype poly_mutation(const Genotype& g, double mutation_rate, double eta_m, Rng& rng);

}  // namespace qdreach
