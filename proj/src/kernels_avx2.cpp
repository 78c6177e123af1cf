// AVX2/FMA lane. Compiled with -mavx2 -mfma on x86-64 only; the dispatcher
// checks CPU support at runtime before handing out these entry points.
#if defined(QDREACH_HAVE_AVX2_BUILD)

#include "qdreach/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <limits>

namespace qdreach::kernels {
namespace {

// exp(x) for x in (kExpFlush, 0], Cody-Waite range reduction plus the
// classic rational approximation exp(r) = 1 + 2 r P(r^2) / (Q(r^2) - r P(r^2)).
// Callers mask out lanes at or below kExpFlush, so 2^n never denormalizes
// (n >= -1021) and the int32 exponent conversion cannot overflow on live lanes.
inline __m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);
  const __m256d rr = _mm256_mul_pd(r, r);

  __m256d p = _mm256_set1_pd(1.26177193074810590878e-4);
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(3.02994407707441961300e-2));
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(9.99999999999999999910e-1));
  p = _mm256_mul_pd(p, r);

  __m256d q = _mm256_set1_pd(3.00198505138664455042e-6);
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.52448340349684104192e-3));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.27265548208155028766e-1));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.0));

  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_fmadd_pd(e, _mm256_set1_pd(2.0), _mm256_set1_pd(1.0));

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m256i n64 = _mm256_cvtepi32_epi64(n32);
  const __m256i pow2 =
      _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(e, _mm256_castsi256_pd(pow2));
}

inline __m256d sqdist4(const double* q, const ColsView& pts, std::size_t i) {
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t d = 0; d < pts.dim; ++d) {
    const __m256d v = _mm256_loadu_pd(pts.cols[d] + i);
    const __m256d diff = _mm256_sub_pd(v, _mm256_set1_pd(q[d]));
    acc = _mm256_fmadd_pd(diff, diff, acc);
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

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void sqdist_avx2(const double* q, const ColsView& pts, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= pts.count; i += 4) _mm256_storeu_pd(out + i, sqdist4(q, pts, i));
  for (; i < pts.count; ++i) out[i] = sqdist_tail(q, pts, i);
}

double kde_sum_avx2(const double* q, const ColsView& pts, double inv_h2) {
  const __m256d scale = _mm256_set1_pd(-0.5 * inv_h2);
  const __m256d flush = _mm256_set1_pd(kExpFlush);
  __m256d sum0 = _mm256_setzero_pd();
  __m256d sum1 = _mm256_setzero_pd();

  std::size_t i = 0;
  for (; i + 8 <= pts.count; i += 8) {
    // Two independent accumulator chains keep the FMA pipeline busy.
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    for (std::size_t d = 0; d < pts.dim; ++d) {
      const __m256d qd = _mm256_set1_pd(q[d]);
      const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(pts.cols[d] + i), qd);
      const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(pts.cols[d] + i + 4), qd);
      a0 = _mm256_fmadd_pd(d0, d0, a0);
      a1 = _mm256_fmadd_pd(d1, d1, a1);
    }
    const __m256d x0 = _mm256_mul_pd(a0, scale);
    const __m256d x1 = _mm256_mul_pd(a1, scale);
    const __m256d m0 = _mm256_cmp_pd(x0, flush, _CMP_GT_OQ);
    const __m256d m1 = _mm256_cmp_pd(x1, flush, _CMP_GT_OQ);
    if (_mm256_movemask_pd(m0)) sum0 = _mm256_add_pd(sum0, _mm256_and_pd(exp_pd(x0), m0));
    if (_mm256_movemask_pd(m1)) sum1 = _mm256_add_pd(sum1, _mm256_and_pd(exp_pd(x1), m1));
  }
  for (; i + 4 <= pts.count; i += 4) {
    const __m256d x = _mm256_mul_pd(sqdist4(q, pts, i), scale);
    const __m256d m = _mm256_cmp_pd(x, flush, _CMP_GT_OQ);
    if (_mm256_movemask_pd(m)) sum0 = _mm256_add_pd(sum0, _mm256_and_pd(exp_pd(x), m));
  }

  double sum = hsum(_mm256_add_pd(sum0, sum1));
  for (; i < pts.count; ++i) {
    const double x = -0.5 * sqdist_tail(q, pts, i) * inv_h2;
    if (x > kExpFlush) sum += std::exp(x);
  }
  return sum;
}

std::size_t argmin_avx2(const double* q, const ColsView& pts, double* best) {
  std::size_t i = 0;
  double best_d = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;

  if (pts.count >= 4) {
    __m256d bv = _mm256_set1_pd(best_d);
    __m256i bi = _mm256_setzero_si256();
    __m256i idx = _mm256_setr_epi64x(0, 1, 2, 3);
    const __m256i step = _mm256_set1_epi64x(4);
    for (; i + 4 <= pts.count; i += 4) {
      const __m256d d = sqdist4(q, pts, i);
      const __m256d lt = _mm256_cmp_pd(d, bv, _CMP_LT_OQ);
      bv = _mm256_blendv_pd(bv, d, lt);
      bi = _mm256_blendv_epi8(bi, idx, _mm256_castpd_si256(lt));
      idx = _mm256_add_epi64(idx, step);
    }
    alignas(32) double vals[4];
    alignas(32) std::int64_t idxs[4];
    _mm256_store_pd(vals, bv);
    _mm256_store_si256(reinterpret_cast<__m256i*>(idxs), bi);
    for (int lane = 0; lane < 4; ++lane) {
      const auto cand = static_cast<std::size_t>(idxs[lane]);
      if (vals[lane] < best_d || (vals[lane] == best_d && cand < best_i)) {
        best_d = vals[lane];
        best_i = cand;
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

const Ops kAvx2Ops{"avx2", &sqdist_avx2, &kde_sum_avx2, &argmin_avx2};

}  // namespace

const Ops* avx2_ops() {
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &kAvx2Ops;
  return nullptr;
}

}  // namespace qdreach::kernels

#endif  // QDREACH_HAVE_AVX2_BUILD
