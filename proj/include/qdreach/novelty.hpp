#pragma once

#include <span>
#include <vector>

#include "qdreach/kernels.hpp"
#include "qdreach/types.hpp"

namespace qdreach {

// The reference pool for a novelty sweep is the archive plus the current
// generation's leftover offspring. Rather than copying everything into one
// matrix each generation, the pool is a list of column-view segments and the
// kernel sums simply add up across segments.
using PoolView = std::span<const kernels::ColsView>;

// Silverman's rule over the pooled points (already normalized): the mean of
// the per-dimension sample standard deviations times (4 / ((d + 2) N))^(1/(d+4)).
// Degenerate pools (a single point, or zero spread) fall back to 0.01.
double silverman_bandwidth(PoolView pool);

// Sparseness score in [~0, 1]: one minus the average Gaussian kernel density
// of `query` (normalized coordinates) against the pool.
double novelty(const double* query, PoolView pool, double h);

// Convenience overloads working on physical behaviors plus bounds; these are
// the reference entry points, the column-view forms are what the search loop
// uses.
double silverman_bandwidth(const std::vector<Vec>& behaviors, const BehaviorBounds& bounds);
double novelty(const Vec& behavior, const std::vector<Vec>& pool, const BehaviorBounds& bounds,
               double h);

}  // namespace qdreach
