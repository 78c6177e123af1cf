#include "qdreach/kernels.hpp"

#include <cmath>

namespace qdreach::kernels {
namespace {

double sqdist_one(const double* q, const ColsView& pts, std::size_t i) {
  double acc = 0.0;
  for (std::size_t d = 0; d < pts.dim; ++d) {
    const double diff = pts.cols[d][i] - q[d];
    acc += diff * diff;
  }
  return acc;
}

void sqdist_scalar(const double* q, const ColsView& pts, double* out) {
  for (std::size_t i = 0; i < pts.count; ++i) out[i] = sqdist_one(q, pts, i);
}

double kde_sum_scalar(const double* q, const ColsView& pts, double inv_h2) {
  double sum = 0.0;
  for (std::size_t i = 0; i < pts.count; ++i) {
    const double x = -0.5 * sqdist_one(q, pts, i) * inv_h2;
    if (x > kExpFlush) sum += std::exp(x);
  }
  return sum;
}

std::size_t argmin_scalar(const double* q, const ColsView& pts, double* best) {
  std::size_t best_i = 0;
  double best_d = sqdist_one(q, pts, 0);
  for (std::size_t i = 1; i < pts.count; ++i) {
    const double d = sqdist_one(q, pts, i);
    if (d < best_d) {
      best_d = d;
      best_i = i;
    }
  }
  *best = best_d;
  return best_i;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{"scalar", &sqdist_scalar, &kde_sum_scalar, &argmin_scalar};
  return ops;
}

}  // namespace qdreach::kernels
