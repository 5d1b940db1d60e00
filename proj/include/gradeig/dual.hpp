#pragma once

// Vector forward-mode dual numbers.
//
// A Dual carries a primal value and a tangent vector of length `dim`, one
// entry per design coordinate. Seeding every design coordinate with a basis
// tangent (see lift_design) yields the full gradient with respect to the
// design in one forward pass.
//
// Tangents live in a fixed-capacity inline array so arithmetic never
// allocates; `dim` is the number of active entries.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gradeig {

inline constexpr std::size_t kMaxTangents = 16;

class DualError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class Dual {
 public:
  Dual() = default;

  /// Constant with a zero tangent of length `dim`.
  Dual(double value, std::size_t dim) : value_(value), dim_(checked_dim(dim)) {}

  /// Variable seeded with the k-th standard basis tangent.
  static Dual variable(double value, std::size_t dim, std::size_t k) {
    Dual d(value, dim);
    if (k >= dim) throw DualError("Dual::variable: seed index out of range");
    d.tan_[k] = 1.0;
    return d;
  }

  static Dual with_tangent(double value, std::span<const double> tangent) {
    Dual d(value, tangent.size());
    std::copy(tangent.begin(), tangent.end(), d.tan_.begin());
    return d;
  }

  double value() const noexcept { return value_; }
  std::size_t dim() const noexcept { return dim_; }
  double d(std::size_t k) const noexcept { return tan_[k]; }
  std::span<const double> tangent() const noexcept { return {tan_.data(), dim_}; }
  std::span<double> tangent_mut() noexcept { return {tan_.data(), dim_}; }

  Dual operator-() const noexcept {
    Dual r(*this);
    r.value_ = -value_;
    for (std::size_t k = 0; k < dim_; ++k) r.tan_[k] = -tan_[k];
    return r;
  }

  Dual& operator+=(const Dual& o) {
    check_same(o);
    value_ += o.value_;
    for (std::size_t k = 0; k < dim_; ++k) tan_[k] += o.tan_[k];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    check_same(o);
    value_ -= o.value_;
    for (std::size_t k = 0; k < dim_; ++k) tan_[k] -= o.tan_[k];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    check_same(o);
    for (std::size_t k = 0; k < dim_; ++k) tan_[k] = tan_[k] * o.value_ + value_ * o.tan_[k];
    value_ *= o.value_;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    check_same(o);
    if (o.value_ == 0.0) throw DualError("Dual division by zero");
    const double inv = 1.0 / o.value_;
    const double q = value_ * inv;
    for (std::size_t k = 0; k < dim_; ++k) tan_[k] = (tan_[k] - q * o.tan_[k]) * inv;
    value_ = value_ / o.value_;
    return *this;
  }

  Dual& operator+=(double c) noexcept {
    value_ += c;
    return *this;
  }
  Dual& operator-=(double c) noexcept {
    value_ -= c;
    return *this;
  }
  Dual& operator*=(double c) noexcept {
    value_ *= c;
    for (std::size_t k = 0; k < dim_; ++k) tan_[k] *= c;
    return *this;
  }
  Dual& operator/=(double c) {
    if (c == 0.0) throw DualError("Dual division by zero");
    value_ /= c;
    for (std::size_t k = 0; k < dim_; ++k) tan_[k] /= c;
    return *this;
  }

  /// Chain rule for a unary function with primal result `f` and derivative `df`.
  Dual apply(double f, double df) const noexcept {
    Dual r(*this);
    r.value_ = f;
    for (std::size_t k = 0; k < dim_; ++k) r.tan_[k] = df * tan_[k];
    return r;
  }

 private:
  static std::uint32_t checked_dim(std::size_t dim) {
    if (dim > kMaxTangents) {
      throw DualError("tangent dimension " + std::to_string(dim) + " exceeds capacity " +
                      std::to_string(kMaxTangents));
    }
    return static_cast<std::uint32_t>(dim);
  }
  void check_same(const Dual& o) const {
    if (o.dim_ != dim_) {
      throw DualError("Dual tangent length mismatch: " + std::to_string(dim_) + " vs " +
                      std::to_string(o.dim_));
    }
  }

  double value_ = 0.0;
  std::uint32_t dim_ = 0;
  std::array<double, kMaxTangents> tan_{};
};

inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(Dual a, const Dual& b) { return a *= b; }
inline Dual operator/(Dual a, const Dual& b) { return a /= b; }
inline Dual operator+(Dual a, double c) { return a += c; }
inline Dual operator+(double c, Dual a) { return a += c; }
inline Dual operator-(Dual a, double c) { return a -= c; }
inline Dual operator-(double c, const Dual& a) { return (-a) += c; }
inline Dual operator*(Dual a, double c) { return a *= c; }
inline Dual operator*(double c, Dual a) { return a *= c; }
inline Dual operator/(Dual a, double c) { return a /= c; }
inline Dual operator/(double c, const Dual& a) {
  if (a.value() == 0.0) throw DualError("Dual division by zero");
  const double v = c / a.value();
  return a.apply(v, -v / a.value());
}

// Comparisons look at primal values only.
inline bool operator<(const Dual& a, const Dual& b) { return a.value() < b.value(); }
inline bool operator>(const Dual& a, const Dual& b) { return a.value() > b.value(); }
inline bool operator<=(const Dual& a, const Dual& b) { return a.value() <= b.value(); }
inline bool operator>=(const Dual& a, const Dual& b) { return a.value() >= b.value(); }
inline bool operator<(const Dual& a, double b) { return a.value() < b; }
inline bool operator>(const Dual& a, double b) { return a.value() > b; }
inline bool operator<=(const Dual& a, double b) { return a.value() <= b; }
inline bool operator>=(const Dual& a, double b) { return a.value() >= b; }
inline bool operator<(double a, const Dual& b) { return a < b.value(); }
inline bool operator>(double a, const Dual& b) { return a > b.value(); }

inline Dual exp(const Dual& x) {
  const double e = std::exp(x.value());
  return x.apply(e, e);
}

inline Dual log(const Dual& x) {
  if (!(x.value() > 0.0)) throw DualError("log of non-positive value " + std::to_string(x.value()));
  return x.apply(std::log(x.value()), 1.0 / x.value());
}

inline Dual sqrt(const Dual& x) {
  if (x.value() < 0.0) throw DualError("sqrt of negative value " + std::to_string(x.value()));
  const double s = std::sqrt(x.value());
  if (s == 0.0) throw DualError("sqrt derivative undefined at 0");
  return x.apply(s, 0.5 / s);
}

// d|x|/dx = sign(x) with sign(0) = 0.
inline Dual abs(const Dual& x) {
  const double v = x.value();
  const double s = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
  return x.apply(std::abs(v), s);
}

inline Dual tanh(const Dual& x) {
  const double t = std::tanh(x.value());
  return x.apply(t, 1.0 - t * t);
}

inline Dual pow(const Dual& x, double p) {
  const double v = x.value();
  if (v < 0.0 && p != std::floor(p)) throw DualError("pow: negative base with non-integer exponent");
  if (v == 0.0 && p < 1.0) throw DualError("pow: derivative undefined at 0");
  return x.apply(std::pow(v, p), p * std::pow(v, p - 1.0));
}

inline Dual pow(const Dual& x, const Dual& p) {
  if (!(x.value() > 0.0)) throw DualError("pow: base must be positive for Dual exponent");
  return exp(p * log(x));
}

inline double value_of(double x) noexcept { return x; }
inline double value_of(const Dual& x) noexcept { return x.value(); }

/// Seed each design coordinate with its basis tangent.
std::vector<Dual> lift_design(std::span<const double> lambda);

/// Primal values of a Dual vector.
std::vector<double> values_of(std::span<const Dual> xs);

/// Gradient of a scalar Dual as a plain vector.
inline std::vector<double> gradient_of(const Dual& x) {
  return {x.tangent().begin(), x.tangent().end()};
}

/// Compares the dual gradient of `f` against central differences.
/// Returns max_k |dual_k - fd_k| / (|fd_k| + 1e-12). `f` must be callable
/// with both std::vector<Dual> and std::vector<double>.
template <class F>
double grad_check(F&& f, std::span<const double> lambda, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("grad_check: h must be positive");
  const Dual at = f(lift_design(lambda));
  std::vector<double> x(lambda.begin(), lambda.end());
  double worst = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double x0 = x[k];
    x[k] = x0 + h;
    const double fp = f(x);
    x[k] = x0 - h;
    const double fm = f(x);
    x[k] = x0;
    const double fd = (fp - fm) / (2.0 * h);
    worst = std::max(worst, std::abs(at.d(k) - fd) / (std::abs(fd) + 1e-12));
  }
  return worst;
}

}  // namespace gradeig
