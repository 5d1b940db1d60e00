#pragma once

// Fixed-step explicit Runge-Kutta integration (Kutta's 3/8 rule).

#include <array>
#include <cstddef>

namespace gradeig {

/// One 3/8-rule step of size h from (t, x). `rhs(t, x, dx)` writes dx/dt.
template <class T, std::size_t N, class Rhs>
void rk38_step(Rhs& rhs, double t, double h, std::array<T, N>& x) {
  std::array<T, N> k1, k2, k3, k4, tmp;
  rhs(t, x, k1);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + (h / 3.0) * k1[i];
  rhs(t + h / 3.0, tmp, k2);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + h * (k2[i] - k1[i] / 3.0);
  rhs(t + 2.0 * h / 3.0, tmp, k3);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + h * (k1[i] - k2[i] + k3[i]);
  rhs(t + h, tmp, k4);
  for (std::size_t i = 0; i < N; ++i) x[i] += (h / 8.0) * (k1[i] + 3.0 * (k2[i] + k3[i]) + k4[i]);
}

/// Integrates `steps` fixed steps from t0, calling observe(step_index, t, x)
/// at the initial point and after every step.
template <class T, std::size_t N, class Rhs, class Observer>
void integrate_rk38(Rhs&& rhs, std::array<T, N>& x, double t0, double h, std::size_t steps, Observer&& observe) {
  observe(std::size_t{0}, t0, x);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = t0 + static_cast<double>(s) * h;
    rk38_step(rhs, t, h, x);
    observe(s + 1, t0 + static_cast<double>(s + 1) * h, x);
  }
}

}  // namespace gradeig
