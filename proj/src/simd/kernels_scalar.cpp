#include <cmath>
#include <limits>

#include "gradeig/simd/kernels.hpp"

namespace gradeig::simd::detail {
namespace {

double max_value(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

double sum_exp_shifted(const double* x, std::size_t n, double shift) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(x[i] - shift);
  return s;
}

void exp_into(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scaled_sq_dist(const double* cols, std::size_t n, std::size_t dims, const double* query,
                    const double* inv_h, double* out) {
  for (std::size_t j = 0; j < n; ++j) out[j] = 0.0;
  for (std::size_t d = 0; d < dims; ++d) {
    const double* col = cols + d * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double z = (col[j] - query[d]) * inv_h[d];
      out[j] += z * z;
    }
  }
}

}  // namespace

const KernelTable kScalarKernels{Isa::scalar, max_value, sum_exp_shifted, exp_into, axpy, scaled_sq_dist};

}  // namespace gradeig::simd::detail
