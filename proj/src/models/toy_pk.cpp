#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "gradeig/models/pk.hpp"
#include "gradeig/models/toy.hpp"

namespace gradeig::models {

ToyModel::ToyModel(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("ToyModel: sigma must be positive");
}

double ToyModel::log_prior(std::span<const double> theta) const {
  return (theta[0] >= 0.0 && theta[0] <= 1.0) ? 0.0 : -std::numeric_limits<double>::infinity();
}

std::vector<double> ToyModel::sampler_scales() const { return {1.0 / std::sqrt(12.0)}; }

namespace {
constexpr double kPkPriorVar = 0.05;
const double kPkPriorMean[3] = {0.0, std::log(0.1), std::log(20.0)};
}  // namespace

PkModel::PkModel(PkNoise noise, std::size_t n_times, double t_max) : noise_(noise), n_(n_times), t_max_(t_max) {
  if (!(noise_.sigma_add > 0.0)) throw std::invalid_argument("PkModel: additive noise sd must be positive");
  if (noise_.sigma_mul < 0.0) throw std::invalid_argument("PkModel: multiplicative noise sd must be >= 0");
  if (n_ == 0 || n_ > kMaxTangents) throw std::invalid_argument("PkModel: unsupported number of sampling times");
  if (!(t_max_ > 0.0)) throw std::invalid_argument("PkModel: t_max must be positive");
}

std::vector<double> PkModel::sample_prior_values(Rng& rng) const {
  std::vector<double> theta(3);
  const double sd = std::sqrt(kPkPriorVar);
  for (std::size_t k = 0; k < 3; ++k) theta[k] = std::exp(kPkPriorMean[k] + sd * standard_normal(rng));
  return theta;
}

double PkModel::log_prior(std::span<const double> theta) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    if (!(theta[k] > 0.0)) return -std::numeric_limits<double>::infinity();
    const double z = std::log(theta[k]);
    const double r = z - kPkPriorMean[k];
    acc += -0.5 * r * r / kPkPriorVar - 0.5 * std::log(2.0 * std::numbers::pi * kPkPriorVar) - z;
  }
  return acc;
}

std::vector<CoordinateTransform> PkModel::sampler_transforms() const {
  return std::vector<CoordinateTransform>(3, CoordinateTransform{CoordinateTransform::Kind::log});
}

std::vector<double> PkModel::sampler_scales() const { return std::vector<double>(3, std::sqrt(kPkPriorVar)); }

std::optional<double> PkModel::prior_entropy() const {
  return 1.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * kPkPriorVar);
}

}  // namespace gradeig::models
