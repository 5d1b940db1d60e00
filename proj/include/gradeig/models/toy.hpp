#pragma once

// Two-output nonlinear algebraic model with a scalar parameter theta ~ U(0,1)
// and designs d in [0,1]^2:
//   y1 = 0.5 theta^3 d1 + theta exp(-|0.2 - 0.5 d1|) + d1^2 + sigma eps1
//   y2 = 0.5 theta^3 (d2 + 1.6) + theta exp(-|0.6 + 0.5 d2|) + d2^2 + sigma eps2

#include "gradeig/model.hpp"
#include "gradeig/models/gaussian.hpp"

namespace gradeig::models {

class ToyModel : public ModelBase<ToyModel> {
 public:
  explicit ToyModel(double sigma);

  std::string name() const override { return "toy"; }
  std::size_t theta_dim() const override { return 1; }
  std::size_t design_dim() const override { return 2; }
  std::size_t obs_dim() const override { return 2; }
  std::size_t noise_dim() const override { return 2; }
  Box design_box() const override { return Box::uniform(2, 0.0, 1.0); }

  double sigma() const noexcept { return sigma_; }

  std::vector<double> sample_prior_values(Rng& rng) const override { return {uniform01(rng)}; }
  double log_prior(std::span<const double> theta) const override;
  std::vector<double> sampler_scales() const override;
  std::optional<double> prior_entropy() const override { return 0.0; }

  template <class T>
  std::vector<T> forward_t(std::span<const double> theta, std::span<const T> d) const {
    using std::abs;
    using std::exp;
    const double t = theta[0];
    const double t3 = 0.5 * t * t * t;
    return {t3 * d[0] + t * exp(-abs(0.2 - 0.5 * d[0])) + d[0] * d[0],
            t3 * (d[1] + 1.6) + t * exp(-abs(0.6 + 0.5 * d[1])) + d[1] * d[1]};
  }

  template <class T>
  std::vector<T> observe_t(std::span<const T> f, std::span<const double> noise, std::span<const T>) const {
    return {f[0] + sigma_ * noise[0], f[1] + sigma_ * noise[1]};
  }

  template <class T>
  T log_likelihood_t(std::span<const T> y, std::span<const T> f, std::span<const T> lambda) const {
    return gaussian_additive_loglik<T>(y, f, sigma_, lambda.size());
  }

 private:
  double sigma_;
};

}  // namespace gradeig::models
