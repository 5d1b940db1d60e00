#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

#include "gradeig/simd/kernels.hpp"

namespace gradeig::simd {

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa)) throw std::runtime_error("SIMD variant not available: " + std::string(isa_name(isa)));
#if defined(__x86_64__) || defined(__i386__)
  if (isa == Isa::avx2) return detail::kAvx2Kernels;
#endif
  return detail::kScalarKernels;
}

namespace {
const KernelTable& select() {
  if (const char* env = std::getenv("GRADEIG_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return detail::kScalarKernels;
    if (want == "avx2") return kernels_for(Isa::avx2);
  }
  if (isa_available(Isa::avx2)) return kernels_for(Isa::avx2);
  return detail::kScalarKernels;
}
}  // namespace

const KernelTable& kernels() {
  static const KernelTable& table = select();
  return table;
}

double log_sum_exp(const double* x, std::size_t n) {
  const auto& k = kernels();
  const double m = k.max_value(x, n);
  if (m == -std::numeric_limits<double>::infinity()) return m;
  if (!std::isfinite(m)) return m;
  return m + std::log(k.sum_exp_shifted(x, n, m));
}

}  // namespace gradeig::simd
