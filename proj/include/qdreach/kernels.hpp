#pragma once

#include <cstddef>

namespace qdreach::kernels {

// Point sets are stored column-major: cols[d] points to `count` doubles
// holding dimension d of every point. That keeps each dimension contiguous,
// which is what the vector lanes want, and lets an archive grow by amortized
// push_back instead of re-packing rows.
struct ColsView {
  const double* const* cols = nullptr;
  std::size_t count = 0;
  std::size_t dim = 0;
};

// exp(x) is flushed to exactly zero for x <= kExpFlush in every lane so the
// scalar reference and the SIMD variants agree bit-for-bit on which kernel
// terms vanish. exp(-708) < 4e-308: far below any contribution a density sum
// could resolve.
inline constexpr double kExpFlush = -708.0;

struct Ops {
  const char* name;
  // out[i] = squared Euclidean distance from q to point i.
  void (*sqdist)(const double* q, const ColsView& pts, double* out);
  // Returns sum_i exp(-0.5 * sqdist(q, p_i) * inv_h2).
  double (*kde_sum)(const double* q, const ColsView& pts, double inv_h2);
  // Returns the index of the point with minimal squared distance (ties break
  // to the lowest index) and writes that squared distance to *best. count > 0.
  std::size_t (*argmin_sqdist)(const double* q, const ColsView& pts, double* best);
};

// Portable reference lane.
const Ops& scalar_ops();

// Architecture lanes; null when the build or the running CPU lacks them.
const Ops* avx2_ops();
const Ops* neon_ops();

// Lane selected at startup: the widest available one, unless the environment
// variable QDREACH_FORCE_SCALAR is set to a non-empty value.
const Ops& ops();

}  // namespace qdreach::kernels
