#include "gradeig/models/linear.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gradeig/linalg.hpp"

namespace gradeig::models {

LinearModel::LinearModel(std::size_t n, double sigma2) : LinearModel(n, sigma2, Box::uniform(n, -1.0, 1.0)) {}

LinearModel::LinearModel(std::size_t n, double sigma2, Box box)
    : n_(n), sigma2_(sigma2), sigma_(std::sqrt(sigma2)), box_(std::move(box)) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("LinearModel: sigma2 must be positive");
  if (box_.dim() != n) throw std::invalid_argument("LinearModel: box dimension mismatch");
  if (n > kMaxTangents) throw std::invalid_argument("LinearModel: too many design coordinates");
}

std::vector<double> LinearModel::sample_prior_values(Rng& rng) const {
  return {standard_normal(rng), standard_normal(rng), standard_normal(rng)};
}

double LinearModel::log_prior(std::span<const double> theta) const {
  double acc = -3.0 * kHalfLog2Pi;
  for (double t : theta) acc -= 0.5 * t * t;
  return acc;
}

std::optional<double> LinearModel::prior_entropy() const {
  return 1.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
}

namespace {

Eigen::MatrixXd design_matrix(std::span<const double> lambda) {
  Eigen::MatrixXd d(lambda.size(), 3);
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    d(static_cast<Eigen::Index>(k), 0) = 1.0;
    d(static_cast<Eigen::Index>(k), 1) = lambda[k];
    d(static_cast<Eigen::Index>(k), 2) = lambda[k] * lambda[k];
  }
  return d;
}

}  // namespace

std::vector<double> LinearModel::posterior_mean(std::span<const double> y, std::span<const double> lambda) const {
  const Eigen::MatrixXd d = design_matrix(lambda);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  const Eigen::Matrix3d precision = Eigen::Matrix3d::Identity() + d.transpose() * d / sigma2_;
  const Eigen::Vector3d mean = precision.llt().solve(d.transpose() * yv / sigma2_);
  return {mean(0), mean(1), mean(2)};
}

std::vector<double> LinearModel::sample_exact_posterior(std::span<const double> y, std::span<const double> lambda,
                                                        Rng& rng) const {
  const Eigen::MatrixXd d = design_matrix(lambda);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  const Eigen::Matrix3d precision = Eigen::Matrix3d::Identity() + d.transpose() * d / sigma2_;
  const Eigen::LLT<Eigen::Matrix3d> llt(precision);
  const Eigen::Vector3d mean = llt.solve(d.transpose() * yv / sigma2_);
  // precision = L L'; L'^{-1} z has covariance precision^{-1}.
  Eigen::Vector3d z(standard_normal(rng), standard_normal(rng), standard_normal(rng));
  const Eigen::Vector3d draw = mean + llt.matrixU().solve(z);
  return {draw(0), draw(1), draw(2)};
}

template <class T>
T linear_eig(std::span<const T> lambda, double sigma2) {
  const std::size_t n = lambda.size();
  if (n == 0) return make_constant<T>(0.0, 0);
  // DD' + sigma^2 I, with (DD')_ab = 1 + l_a l_b + l_a^2 l_b^2.
  std::vector<T> m;
  m.reserve(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const T p = lambda[a] * lambda[b];
      T entry = 1.0 + p + p * p;
      if (a == b) entry += sigma2;
      m.push_back(entry);
    }
  }
  return 0.5 * (log_abs_det(std::move(m), n) - static_cast<double>(n) * std::log(sigma2));
}

template double linear_eig<double>(std::span<const double>, double);
template Dual linear_eig<Dual>(std::span<const Dual>, double);

EigWithGradient linear_eig_oracle(std::span<const double> lambda, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("linear_eig_oracle: sigma2 must be positive");
  const auto lifted = lift_design(lambda);
  const Dual u = linear_eig<Dual>(lifted, sigma2);
  return {u.value(), gradient_of(u)};
}

}  // namespace gradeig::models
