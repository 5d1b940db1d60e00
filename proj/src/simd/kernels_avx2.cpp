// AVX2 variants. Compiled with per-function target attributes so the rest of
// the build stays at the baseline ISA; dispatch.cpp only hands these out
// when the CPU reports AVX2.

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "gradeig/simd/kernels.hpp"

#define GRADEIG_AVX2 __attribute__((target("avx2")))

namespace gradeig::simd::detail {
namespace {

GRADEIG_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

GRADEIG_AVX2 inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

// 2^n for integral n in [-1022, 1023] held in a double lane.
GRADEIG_AVX2 inline __m256d pow2(__m256d n) {
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 1.5 * 2^52
  __m256i bits = _mm256_castpd_si256(_mm256_add_pd(n, magic));
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  return _mm256_castsi256_pd(bits);
}

// Cephes-style exp: x = n ln2 + r, |r| <= ln2/2, rational approximation on r.
GRADEIG_AVX2 inline __m256d exp_pd(__m256d x) {
  const __m256d kHi = _mm256_set1_pd(709.782712893384);
  const __m256d kLo = _mm256_set1_pd(-745.1332191019412);
  const __m256d under = _mm256_cmp_pd(x, kLo, _CMP_LT_OQ);
  const __m256d over = _mm256_cmp_pd(x, kHi, _CMP_GT_OQ);
  const __m256d nan = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);
  const __m256d xc = _mm256_min_pd(_mm256_max_pd(x, kLo), kHi);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, _mm256_set1_pd(1.4426950408889634073599)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_sub_pd(xc, _mm256_mul_pd(n, _mm256_set1_pd(6.93145751953125E-1)));
  r = _mm256_sub_pd(r, _mm256_mul_pd(n, _mm256_set1_pd(1.42860682030941723212E-6)));
  const __m256d rr = _mm256_mul_pd(r, r);

  __m256d p = _mm256_set1_pd(1.26177193074810590878E-4);
  p = _mm256_add_pd(_mm256_mul_pd(p, rr), _mm256_set1_pd(3.02994407707441961300E-2));
  p = _mm256_add_pd(_mm256_mul_pd(p, rr), _mm256_set1_pd(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_set1_pd(3.00198505138664455042E-6);
  q = _mm256_add_pd(_mm256_mul_pd(q, rr), _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_add_pd(_mm256_mul_pd(q, rr), _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_add_pd(_mm256_mul_pd(q, rr), _mm256_set1_pd(2.00000000000000000009E0));
  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_add_pd(_mm256_set1_pd(1.0), _mm256_add_pd(e, e));

  // Split the scale so both halves stay in the normal exponent range.
  const __m256d n1 = _mm256_floor_pd(_mm256_mul_pd(n, _mm256_set1_pd(0.5)));
  const __m256d n2 = _mm256_sub_pd(n, n1);
  e = _mm256_mul_pd(_mm256_mul_pd(e, pow2(n1)), pow2(n2));

  e = _mm256_andnot_pd(under, e);
  e = _mm256_blendv_pd(e, _mm256_set1_pd(std::numeric_limits<double>::infinity()), over);
  return _mm256_blendv_pd(e, x, nan);
}

GRADEIG_AVX2 double max_value(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d acc = _mm256_set1_pd(m);
    for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
    m = hmax(acc);
  }
  for (; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

GRADEIG_AVX2 double sum_exp_shifted(const double* x, std::size_t n, double shift) {
  __m256d acc = _mm256_setzero_pd();
  const __m256d s = _mm256_set1_pd(shift);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, exp_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), s)));
  double total = hsum(acc);
  if (i < n) {
    alignas(32) double tail[4] = {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                                  -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t k = 0; i + k < n; ++k) tail[k] = x[i + k];
    total += hsum(exp_pd(_mm256_sub_pd(_mm256_load_pd(tail), s)));
  }
  return total;
}

GRADEIG_AVX2 void exp_into(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, exp_pd(_mm256_loadu_pd(x + i)));
  if (i < n) {
    alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t k = 0; i + k < n; ++k) buf[k] = x[i + k];
    _mm256_store_pd(buf, exp_pd(_mm256_load_pd(buf)));
    for (std::size_t k = 0; i + k < n; ++k) out[i + k] = buf[k];
  }
}

GRADEIG_AVX2 void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

GRADEIG_AVX2 void scaled_sq_dist(const double* cols, std::size_t n, std::size_t dims, const double* query,
                                 const double* inv_h, double* out) {
  for (std::size_t j = 0; j < n; ++j) out[j] = 0.0;
  for (std::size_t d = 0; d < dims; ++d) {
    const double* col = cols + d * n;
    const __m256d q = _mm256_set1_pd(query[d]);
    const __m256d h = _mm256_set1_pd(inv_h[d]);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const __m256d z = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(col + j), q), h);
      _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(out + j), _mm256_mul_pd(z, z)));
    }
    for (; j < n; ++j) {
      const double z = (col[j] - query[d]) * inv_h[d];
      out[j] += z * z;
    }
  }
}

}  // namespace

const KernelTable kAvx2Kernels{Isa::avx2, max_value, sum_exp_shifted, exp_into, axpy, scaled_sq_dist};

}  // namespace gradeig::simd::detail

#endif
