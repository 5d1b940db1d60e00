#pragma once

// Bayesian linear regression y = D(lambda) theta + sigma * eps with
// D = [1, lambda, lambda^2] (one row per design coordinate), theta ~ N(0, I_3).
// The EIG is available in closed form, which makes this the reference model
// for estimator bias and gradient checks.

#include <span>
#include <vector>

#include "gradeig/model.hpp"
#include "gradeig/models/gaussian.hpp"

namespace gradeig::models {

class LinearModel : public ModelBase<LinearModel> {
 public:
  LinearModel(std::size_t n, double sigma2);
  LinearModel(std::size_t n, double sigma2, Box box);

  std::string name() const override { return "linear"; }
  std::size_t theta_dim() const override { return 3; }
  std::size_t design_dim() const override { return n_; }
  std::size_t obs_dim() const override { return n_; }
  std::size_t noise_dim() const override { return n_; }
  Box design_box() const override { return box_; }

  double sigma2() const noexcept { return sigma2_; }

  std::vector<double> sample_prior_values(Rng& rng) const override;
  double log_prior(std::span<const double> theta) const override;
  std::vector<double> sampler_scales() const override { return {1.0, 1.0, 1.0}; }
  std::optional<double> prior_entropy() const override;

  bool has_exact_posterior() const override { return true; }
  /// Exact draw from N(Sigma D' y / sigma^2, Sigma), Sigma = (I + D'D / sigma^2)^-1.
  std::vector<double> sample_exact_posterior(std::span<const double> y, std::span<const double> lambda,
                                             Rng& rng) const override;
  std::vector<double> posterior_mean(std::span<const double> y, std::span<const double> lambda) const;

  template <class T>
  std::vector<T> forward_t(std::span<const double> theta, std::span<const T> lambda) const {
    std::vector<T> f;
    f.reserve(lambda.size());
    for (const T& l : lambda) f.push_back(theta[0] + theta[1] * l + theta[2] * (l * l));
    return f;
  }

  template <class T>
  std::vector<T> observe_t(std::span<const T> f, std::span<const double> noise, std::span<const T>) const {
    std::vector<T> y;
    y.reserve(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) y.push_back(f[k] + sigma_ * noise[k]);
    return y;
  }

  template <class T>
  T log_likelihood_t(std::span<const T> y, std::span<const T> f, std::span<const T> lambda) const {
    return gaussian_additive_loglik<T>(y, f, sigma_, lambda.size());
  }

 private:
  std::size_t n_;
  double sigma2_;
  double sigma_;
  Box box_;
};

/// Closed-form EIG 1/2 log(|DD' + sigma^2 I| / |sigma^2 I|) for generic scalars.
template <class T>
T linear_eig(std::span<const T> lambda, double sigma2);

struct EigWithGradient {
  double value;
  std::vector<double> gradient;
};

/// Exact EIG and its design gradient (dual numbers through an LU log-determinant).
EigWithGradient linear_eig_oracle(std::span<const double> lambda, double sigma2);

}  // namespace gradeig::models
