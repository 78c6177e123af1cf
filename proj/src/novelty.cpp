#include "qdreach/novelty.hpp"

#include <cmath>
#include <numbers>

namespace qdreach {

namespace {

std::size_t pool_count(PoolView pool) {
  std::size_t n = 0;
  for (const auto& seg : pool) n += seg.count;
  return n;
}

std::size_t pool_dim(PoolView pool) {
  require(!pool.empty(), "novelty pool must contain at least one segment");
  const std::size_t dim = pool.front().dim;
  for (const auto& seg : pool) require(seg.dim == dim, "novelty pool dimension mismatch");
  return dim;
}

}  // namespace

double silverman_bandwidth(PoolView pool) {
  const std::size_t dim = pool_dim(pool);
  const std::size_t n = pool_count(pool);
  require(n >= 1, "bandwidth needs at least one point");
  constexpr double kFloor = 0.01;
  if (n == 1) return kFloor;

  double sigma_sum = 0.0;
  for (std::size_t d = 0; d < dim; ++d) {
    double mean = 0.0;
    for (const auto& seg : pool)
      for (std::size_t i = 0; i < seg.count; ++i) mean += seg.cols[d][i];
    mean /= static_cast<double>(n);
    double m2 = 0.0;
    for (const auto& seg : pool)
      for (std::size_t i = 0; i < seg.count; ++i) {
        const double diff = seg.cols[d][i] - mean;
        m2 += diff * diff;
      }
    sigma_sum += std::sqrt(m2 / static_cast<double>(n - 1));
  }
  const double sigma_bar = sigma_sum / static_cast<double>(dim);
  // Coincident points can leave rounding dust in the deviations (the mean of
  // k equal values is not always that value in floating point), so treat any
  // spread this far below one normalized unit as zero.
  if (sigma_bar < 1e-12) return kFloor;

  const double nd = static_cast<double>(n);
  const double dd = static_cast<double>(dim);
  return sigma_bar * std::pow(4.0 / ((dd + 2.0) * nd), 1.0 / (dd + 4.0));
}

double novelty(const double* query, PoolView pool, double h) {
  require(h > 0.0, "bandwidth must be positive");
  const std::size_t n = pool_count(pool);
  require(n >= 1, "novelty needs a non-empty pool");
  pool_dim(pool);

  const double inv_h2 = 1.0 / (h * h);
  double kernel_sum = 0.0;
  for (const auto& seg : pool) {
    if (seg.count == 0) continue;
    kernel_sum += kernels::ops().kde_sum(query, seg, inv_h2);
  }
  const double norm = 1.0 / (static_cast<double>(n) * h * std::sqrt(2.0 * std::numbers::pi));
  return 1.0 - kernel_sum * norm;
}

double silverman_bandwidth(const std::vector<Vec>& behaviors, const BehaviorBounds& bounds) {
  require(!behaviors.empty(), "bandwidth needs at least one point");
  const int dim = bounds.dim();
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(dim));
  for (const Vec& b : behaviors) {
    require(b.size() == dim, "behavior dimension mismatch");
    for (int d = 0; d < dim; ++d)
      cols[static_cast<std::size_t>(d)].push_back(bounds.normalize(b[d], d));
  }
  std::vector<const double*> ptrs(cols.size());
  for (std::size_t d = 0; d < cols.size(); ++d) ptrs[d] = cols[d].data();
  const kernels::ColsView seg{ptrs.data(), behaviors.size(), cols.size()};
  return silverman_bandwidth(PoolView(&seg, 1));
}

double novelty(const Vec& behavior, const std::vector<Vec>& pool, const BehaviorBounds& bounds,
               double h) {
  require(!pool.empty(), "novelty needs a non-empty pool");
  const int dim = bounds.dim();
  require(behavior.size() == dim, "behavior dimension mismatch");
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(dim));
  for (const Vec& b : pool) {
    require(b.size() == dim, "behavior dimension mismatch");
    for (int d = 0; d < dim; ++d)
      cols[static_cast<std::size_t>(d)].push_back(bounds.normalize(b[d], d));
  }
  std::vector<const double*> ptrs(cols.size());
  for (std::size_t d = 0; d < cols.size(); ++d) ptrs[d] = cols[d].data();
  const kernels::ColsView seg{ptrs.data(), pool.size(), cols.size()};

  Vec q(dim);
  for (int d = 0; d < dim; ++d) q[d] = bounds.normalize(behavior[d], d);
  return novelty(q.data(), PoolView(&seg, 1), h);
}

}  // namespace qdreach
