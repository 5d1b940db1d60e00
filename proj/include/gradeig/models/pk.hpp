#pragma once

// One-compartment pharmacokinetic model with first-order absorption.
// theta = (ka, ke, V), log theta ~ N((log 1, log 0.1, log 20), 0.05 I).
// The design is a vector of blood sampling times; each observation is
//   y_t = f_t (1 + s_mul eps1_t) + s_add eps2_t,
//   f_t = D/V * ka/(ka - ke) * (exp(-ke t) - exp(-ka t)),  D = 400.
// The likelihood marginalizes both noises: y_t ~ N(f_t, s_mul^2 f_t^2 + s_add^2).

#include "gradeig/model.hpp"
#include "gradeig/models/gaussian.hpp"

namespace gradeig::models {

struct PkNoise {
  double sigma_mul = 0.1;            // sd of the multiplicative noise
  double sigma_add = 0.31622776601683794;  // sd of the additive noise
};

class PkModel : public ModelBase<PkModel> {
 public:
  static constexpr double kDose = 400.0;

  PkModel(PkNoise noise, std::size_t n_times = 10, double t_max = 24.0);

  std::string name() const override { return "pk"; }
  std::size_t theta_dim() const override { return 3; }
  std::size_t design_dim() const override { return n_; }
  std::size_t obs_dim() const override { return n_; }
  std::size_t noise_dim() const override { return 2 * n_; }
  Box design_box() const override { return Box::uniform(n_, 0.0, t_max_); }

  const PkNoise& noise() const noexcept { return noise_; }

  std::vector<double> sample_prior_values(Rng& rng) const override;
  double log_prior(std::span<const double> theta) const override;
  std::vector<CoordinateTransform> sampler_transforms() const override;
  std::vector<double> sampler_scales() const override;
  EntropySpace entropy_space() const override { return EntropySpace::log; }
  std::optional<double> prior_entropy() const override;

  template <class T>
  std::vector<T> forward_t(std::span<const double> theta, std::span<const T> times) const {
    using std::exp;
    const double ka = theta[0], ke = theta[1], v = theta[2];
    const double scale = kDose / v * ka / (ka - ke);
    std::vector<T> f;
    f.reserve(times.size());
    for (const T& t : times) f.push_back(scale * (exp(-ke * t) - exp(-ka * t)));
    return f;
  }

  template <class T>
  std::vector<T> observe_t(std::span<const T> f, std::span<const double> noise, std::span<const T>) const {
    std::vector<T> y;
    y.reserve(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
      y.push_back(f[k] * (1.0 + noise_.sigma_mul * noise[k]) + noise_.sigma_add * noise[n_ + k]);
    }
    return y;
  }

  template <class T>
  T log_likelihood_t(std::span<const T> y, std::span<const T> f, std::span<const T> lambda) const {
    using std::log;
    if (noise_.sigma_mul == 0.0) return gaussian_additive_loglik<T>(y, f, noise_.sigma_add, lambda.size());
    const double m2 = noise_.sigma_mul * noise_.sigma_mul;
    const double a2 = noise_.sigma_add * noise_.sigma_add;
    T acc = make_constant<T>(-static_cast<double>(y.size()) * kHalfLog2Pi, lambda.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
      const T var = m2 * (f[k] * f[k]) + a2;
      const T r = y[k] - f[k];
      acc -= 0.5 * (r * r / var + log(var));
    }
    return finite_or_neg_inf(acc);
  }

 private:
  PkNoise noise_;
  std::size_t n_;
  double t_max_;
};

}  // namespace gradeig::models
