// NEON lane for aarch64. Distances are vectorized two-wide; the density sum
// reuses the scalar exp, which on this dimension-bound kernel is not the
// bottleneck.
#if defined(QDREACH_HAVE_NEON_BUILD)

#include "qdreach/kernels.hpp"

#include <arm_neon.h>

#include <cmath>
#include <limits>

namespace qdreach::kernels {
namespace {

inline float64x2_t sqdist2(const double* q, const ColsView& pts, std::size_t i) {
  float64x2_t acc = vdupq_n_f64(0.0);
  for (std::size_t d = 0; d < pts.dim; ++d) {
    const float64x2_t diff = vsubq_f64(vld1q_f64(pts.cols[d] + i), vdupq_n_f64(q[d]));
    acc = vfmaq_f64(acc, diff, diff);
  }
  return acc;
}

inline double sqdist_tail(const double* q, const ColsView& pts, std::size_t i) {
  double acc = 0.0;
  for (std::size_t d = 0; d < pts.dim; ++d) {
    const double diff = pts.cols[d][i] - q[d];
    acc += diff * diff;
  }
  return acc;
}

void sqdist_neon(const double* q, const ColsView& pts, double* out) {
  std::size_t i = 0;
  for (; i + 2 <= pts.count; i += 2) vst1q_f64(out + i, sqdist2(q, pts, i));
  for (; i < pts.count; ++i) out[i] = sqdist_tail(q, pts, i);
}

double kde_sum_neon(const double* q, const ColsView& pts, double inv_h2) {
  double sum = 0.0;
  std::size_t i = 0;
  double buf[2];
  for (; i + 2 <= pts.count; i += 2) {
    vst1q_f64(buf, sqdist2(q, pts, i));
    for (int lane = 0; lane < 2; ++lane) {
      const double x = -0.5 * buf[lane] * inv_h2;
      if (x > kExpFlush) sum += std::exp(x);
    }
  }
  for (; i < pts.count; ++i) {
    const double x = -0.5 * sqdist_tail(q, pts, i) * inv_h2;
    if (x > kExpFlush) sum += std::exp(x);
  }
  return sum;
}

std::size_t argmin_neon(const double* q, const ColsView& pts, double* best) {
  double best_d = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  std::size_t i = 0;
  double buf[2];
  for (; i + 2 <= pts.count; i += 2) {
    vst1q_f64(buf, sqdist2(q, pts, i));
    for (int lane = 0; lane < 2; ++lane) {
      if (buf[lane] < best_d) {
        best_d = buf[lane];
        best_i = i + static_cast<std::size_t>(lane);
      }
    }
  }
  for (; i < pts.count; ++i) {
    const double d = sqdist_tail(q, pts, i);
    if (d < best_d) {
      best_d = d;
      best_i = i;
    }
  }
  *best = best_d;
  return best_i;
}

const Ops kNeonOps{"neon", &sqdist_neon, &kde_sum_neon, &argmin_neon};

}  // namespace

const Ops* neon_ops() { return &kNeonOps; }

}  // namespace qdreach::kernels

#endif  // QDREACH_HAVE_NEON_BUILD
