#include "qdreach/variation.hpp"

#include <algorithm>
#include <cmath>

namespace qdreach {

namespace {
constexpr double kWeightFloor = 1e-6;
constexpr double kSbxEps = 1e-14;
}  // namespace

std::size_t weighted_sample_index(std::span<const double> weights, Rng& rng) {
  require(!weights.empty(), "weighted sample needs at least one weight");
  std::vector<double> prefix(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    require(weights[i] >= 0.0, "weights must be non-negative");
    total += weights[i];
    prefix[i] = total;
  }
  require(total > 0.0, "weight total must be positive");

  const double u = uniform01(rng) * total;
  // First prefix strictly above u: zero-weight entries own empty intervals
  // and can never be hit.
  auto it = std::upper_bound(prefix.begin(), prefix.end(), u);
  if (it != prefix.end()) return static_cast<std::size_t>(it - prefix.begin());
  // u rounded up to the total; fall back to the last positive-weight entry.
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return i;
  return 0;  // unreachable: total > 0 guarantees a positive weight
}

std::vector<double> novelty_weights(std::span<const double> novelties) {
  std::vector<double> weights(novelties.begin(), novelties.end());
  if (weights.empty()) return weights;
  const double lo = *std::min_element(weights.begin(), weights.end());
  for (double& w : weights) w = w - lo + kWeightFloor;
  return weights;
}

Genotype random_genotype(int dim, Rng& rng) {
  Genotype g;
  g.values.resize(dim);
  for (int d = 0; d < dim; ++d) g.values[d] = uniform01(rng);
  return g;
}

std::vector<Genotype> select_parents(const Repertoire& repertoire, int count, Rng& rng) {
  require(count >= 1, "parent count must be positive");
  std::vector<Genotype> parents;
  parents.reserve(static_cast<std::size_t>(count));

  const int drawn = std::min(repertoire.size(), count);
  if (drawn > 0) {
    std::vector<double> novelties(static_cast<std::size_t>(repertoire.size()));
    for (int i = 0; i < repertoire.size(); ++i)
      novelties[static_cast<std::size_t>(i)] = repertoire.at(i).novelty;
    const std::vector<double> weights = novelty_weights(novelties);
    for (int i = 0; i < drawn; ++i) {
      const std::size_t pick = weighted_sample_index(weights, rng);
      parents.push_back(repertoire.at(static_cast<int>(pick)).genotype);
    }
  }
  for (int i = drawn; i < count; ++i)
    parents.push_back(random_genotype(repertoire.genotype_dim(), rng));
  return parents;
}

std::pair<Genotype, Genotype> sbx_crossover(const Genotype& p1, const Genotype& p2,
                                            double crossover_rate, double eta_c, Rng& rng) {
  require(p1.values.size() == p2.values.size(), "parent genotype length mismatch");
  require(crossover_rate >= 0.0 && crossover_rate <= 1.0, "crossover rate outside [0,1]");

  Genotype c1 = p1;
  Genotype c2 = p2;
  const int dim = p1.dim();
  for (int d = 0; d < dim; ++d) {
    if (uniform01(rng) > crossover_rate) continue;
    double y1 = p1.values[d];
    double y2 = p2.values[d];
    if (std::abs(y1 - y2) <= kSbxEps) continue;
    if (y1 > y2) std::swap(y1, y2);

    const double rand = uniform01(rng);
    const double expo = 1.0 / (eta_c + 1.0);

    // Lower child: spread factor confined so the child stays above 0.
    double beta = 1.0 + 2.0 * y1 / (y2 - y1);
    double alpha = 2.0 - std::pow(beta, -(eta_c + 1.0));
    double betaq = (rand <= 1.0 / alpha) ? std::pow(rand * alpha, expo)
                                         : std::pow(1.0 / (2.0 - rand * alpha), expo);
    double lo = 0.5 * ((y1 + y2) - betaq * (y2 - y1));

    // Upper child: confined below 1.
    beta = 1.0 + 2.0 * (1.0 - y2) / (y2 - y1);
    alpha = 2.0 - std::pow(beta, -(eta_c + 1.0));
    betaq = (rand <= 1.0 / alpha) ? std::pow(rand * alpha, expo)
                                  : std::pow(1.0 / (2.0 - rand * alpha), expo);
    double hi = 0.5 * ((y1 + y2) + betaq * (y2 - y1));

    lo = std::clamp(lo, 0.0, 1.0);
    hi = std::clamp(hi, 0.0, 1.0);
    if (uniform01(rng) <= 0.5) std::swap(lo, hi);
    c1.values[d] = lo;
    c2.values[d] = hi;
  }
  return {std::move(c1), std::move(c2)};
}

Genotype poly_mutation(const Genotype& g, double mutation_rate, double eta_m, Rng& rng) {
  require(mutation_rate >= 0.0 && mutation_rate <= 1.0, "mutation rate outside [0,1]");
  Genotype out = g;
  const int dim = g.dim();
  const double mut_pow = 1.0 / (eta_m + 1.0);
  for (int d = 0; d < dim; ++d) {
    if (uniform01(rng) > mutation_rate) continue;
    const double y = out.values[d];
    const double delta1 = y;        // (y - lo) / (hi - lo) on the unit box
    const double delta2 = 1.0 - y;  // (hi - y) / (hi - lo)
    const double rnd = uniform01(rng);
    double deltaq;
    if (rnd <= 0.5) {
      const double xy = 1.0 - delta1;
      const double val = 2.0 * rnd + (1.0 - 2.0 * rnd) * std::pow(xy, eta_m + 1.0);
      deltaq = std::pow(val, mut_pow) - 1.0;
    } else {
      const double xy = 1.0 - delta2;
      const double val =
          2.0 * (1.0 - rnd) + 2.0 * (rnd - 0.5) * std::pow(xy, eta_m + 1.0);
      deltaq = 1.0 - std::pow(val, mut_pow);
    }
    out.values[d] = std::clamp(y + deltaq, 0.0, 1.0);
  }
  return out;
}

}  // namespace qdreach
