#pragma once

// Small models used only by the tests.

#include <cmath>
#include <limits>

#include "gradeig/model.hpp"
#include "gradeig/models/gaussian.hpp"

namespace fixtures {

using gradeig::Box;
using gradeig::Dual;
using gradeig::Rng;

/// y = lambda + eps: observations carry no information about theta ~ N(0, 1).
class IndependentModel : public gradeig::ModelBase<IndependentModel> {
 public:
  std::string name() const override { return "independent"; }
  std::size_t theta_dim() const override { return 1; }
  std::size_t design_dim() const override { return 1; }
  std::size_t obs_dim() const override { return 1; }
  std::size_t noise_dim() const override { return 1; }
  Box design_box() const override { return Box::uniform(1, -1.0, 1.0); }
  std::vector<double> sample_prior_values(Rng& rng) const override { return {gradeig::standard_normal(rng)}; }
  double log_prior(std::span<const double> t) const override {
    return -0.5 * t[0] * t[0] - gradeig::models::kHalfLog2Pi;
  }
  std::vector<double> sampler_scales() const override { return {1.0}; }
  std::optional<double> prior_entropy() const override { return 0.5 * std::log(2.0 * M_PI * M_E); }

  template <class T>
  std::vector<T> forward_t(std::span<const double>, std::span<const T> l) const {
    return {l[0] * l[0]};
  }
  template <class T>
  std::vector<T> observe_t(std::span<const T> f, std::span<const double> e, std::span<const T>) const {
    return {f[0] + e[0]};
  }
  template <class T>
  T log_likelihood_t(std::span<const T> y, std::span<const T> f, std::span<const T> l) const {
    return gradeig::models::gaussian_additive_loglik<T>(y, f, 1.0, l.size());
  }
};

/// Uniform-window likelihood: zero density unless |y - theta| < 0.01.
class WindowModel : public gradeig::ModelBase<WindowModel> {
 public:
  std::string name() const override { return "window"; }
  std::size_t theta_dim() const override { return 1; }
  std::size_t design_dim() const override { return 1; }
  std::size_t obs_dim() const override { return 1; }
  std::size_t noise_dim() const override { return 1; }
  Box design_box() const override { return Box::uniform(1, 0.5, 1.0); }
  std::vector<double> sample_prior_values(Rng& rng) const override { return {100.0 * gradeig::uniform01(rng)}; }
  double log_prior(std::span<const double>) const override { return 0.0; }
  std::vector<double> sampler_scales() const override { return {1.0}; }

  template <class T>
  std::vector<T> forward_t(std::span<const double> t, std::span<const T> l) const {
    return {t[0] * l[0]};
  }
  template <class T>
  std::vector<T> observe_t(std::span<const T> f, std::span<const double> e, std::span<const T>) const {
    return {f[0] + 0.001 * std::tanh(e[0])};
  }
  template <class T>
  T log_likelihood_t(std::span<const T> y, std::span<const T> f, std::span<const T> l) const {
    const double r = std::abs(gradeig::value_of(y[0]) - gradeig::value_of(f[0]));
    const double v = r < 0.01 ? std::log(50.0) : -std::numeric_limits<double>::infinity();
    return gradeig::make_constant<T>(v, l.size());
  }
};

}  // namespace fixtures
