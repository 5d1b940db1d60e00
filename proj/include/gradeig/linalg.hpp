#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gradeig/dual.hpp"

namespace gradeig {

/// log|det A| of a dense row-major n x n matrix by LU decomposition with
/// partial pivoting. Works for double and Dual entries; pivoting decisions
/// use primal values.
template <class T>
T log_abs_det(std::vector<T> a, std::size_t n) {
  if (a.size() != n * n) throw std::invalid_argument("log_abs_det: size mismatch");
  using std::abs;
  using std::log;
  T acc = a.empty() ? T{} : a[0] * 0.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(value_of(a[col * n + col]));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(value_of(a[r * n + col]));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) throw std::domain_error("log_abs_det: singular matrix");
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
    }
    const T pivot = a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const T factor = a[r * n + col] / pivot;
      for (std::size_t c = col + 1; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
    }
    acc += log(abs(pivot));
  }
  return acc;
}

}  // namespace gradeig
