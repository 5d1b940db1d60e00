#pragma once

// Data-parallel inner loops with a scalar reference implementation and an
// AVX2 variant chosen at runtime.
//
// Callers go through kernels(), which resolves once per process. The
// GRADEIG_SIMD environment variable ("scalar" or "avx2") pins the choice.
// Elementwise kernels are bit-identical across variants; reductions and exp
// agree to a few ulps.

#include <cstddef>
#include <string_view>

namespace gradeig::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  /// max over x[0..n); -inf for n == 0.
  double (*max_value)(const double* x, std::size_t n);
  /// sum_i exp(x[i] - shift). Entries equal to -inf contribute 0.
  double (*sum_exp_shifted)(const double* x, std::size_t n, double shift);
  /// out[i] = exp(x[i]).
  void (*exp_into)(const double* x, double* out, std::size_t n);
  /// y[i] += a * x[i].
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// Scaled squared distance from `query` to every point of a dimension-major
  /// sample block: out[j] = sum_d ((cols[d*n + j] - query[d]) * inv_h[d])^2.
  void (*scaled_sq_dist)(const double* cols, std::size_t n, std::size_t dims, const double* query,
                         const double* inv_h, double* out);
};

const KernelTable& kernels();
const KernelTable& kernels_for(Isa isa);
bool isa_available(Isa isa);
std::string_view isa_name(Isa isa);

/// log(sum_i exp(x[i])) using the active kernels; -inf when every entry is -inf.
double log_sum_exp(const double* x, std::size_t n);

namespace detail {
extern const KernelTable kScalarKernels;
#if defined(__x86_64__) || defined(__i386__)
extern const KernelTable kAvx2Kernels;
#endif
}  // namespace detail

}  // namespace gradeig::simd
