#pragma once

#include <cmath>
#include <numbers>
#include <span>

#include "gradeig/model.hpp"

namespace gradeig::models {

inline constexpr double kHalfLog2Pi = 0.91893853320467274178;

/// Independent N(f_k, sigma^2) log-density, including the 1/sigma factor.
template <class T>
T gaussian_additive_loglik(std::span<const T> y, std::span<const T> f, double sigma, std::size_t dim) {
  const double inv = 1.0 / sigma;
  const double norm = -static_cast<double>(y.size()) * (std::log(sigma) + kHalfLog2Pi);
  T acc = make_constant<T>(norm, dim);
  for (std::size_t k = 0; k < y.size(); ++k) {
    const T z = (y[k] - f[k]) * inv;
    acc -= 0.5 * (z * z);
  }
  return finite_or_neg_inf(acc);
}

}  // namespace gradeig::models
