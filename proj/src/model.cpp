#include "gradeig/model.hpp"

#include <atomic>
#include <cmath>

namespace gradeig {

namespace {
std::atomic<ThetaId> g_next_id{1};

double log1pexp(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
}  // namespace

ThetaId next_theta_id() { return g_next_id.fetch_add(1, std::memory_order_relaxed); }

bool SimBudget::charge(ThetaId id) {
  if (!charged_.insert(id).second) return false;
  ++evals_;
  return true;
}

void SimBudget::new_design_version() {
  ++version_;
  charged_.clear();
}

double CoordinateTransform::to_unconstrained(double theta) const {
  switch (kind) {
    case Kind::identity:
      return theta;
    case Kind::log:
      return std::log(theta);
    case Kind::logit: {
      const double s = (theta - lo) / (hi - lo);
      return std::log(s) - std::log1p(-s);
    }
  }
  return theta;
}

double CoordinateTransform::from_unconstrained(double z) const {
  switch (kind) {
    case Kind::identity:
      return z;
    case Kind::log:
      return std::exp(z);
    case Kind::logit:
      return lo + (hi - lo) / (1.0 + std::exp(-z));
  }
  return z;
}

double CoordinateTransform::log_jacobian(double z) const {
  switch (kind) {
    case Kind::identity:
      return 0.0;
    case Kind::log:
      return z;
    case Kind::logit:
      return std::log(hi - lo) - log1pexp(-z) - log1pexp(z);
  }
  return 0.0;
}

std::vector<double> Model::sample_noise(Rng& rng) const {
  std::vector<double> eps(noise_dim());
  for (double& e : eps) e = standard_normal(rng);
  return eps;
}

std::vector<CoordinateTransform> Model::sampler_transforms() const {
  return std::vector<CoordinateTransform>(theta_dim());
}

std::vector<double> Model::sample_exact_posterior(std::span<const double>, std::span<const double>, Rng&) const {
  throw std::logic_error("model '" + name() + "' has no exact posterior sampler");
}

std::vector<double> simulate(const Model& model, const Theta& theta, std::span<const double> noise,
                             std::span<const double> lambda, SimBudget& budget) {
  budget.charge(theta.id);
  const auto f = model.forward(theta.values, lambda);
  return model.observe(f, noise, lambda);
}

std::vector<Dual> simulate(const Model& model, const Theta& theta, std::span<const double> noise,
                           std::span<const Dual> lambda, SimBudget& budget) {
  budget.charge(theta.id);
  const auto f = model.forward(theta.values, lambda);
  return model.observe(f, noise, lambda);
}

double log_likelihood(const Model& model, std::span<const double> y, const Theta& theta,
                      std::span<const double> lambda, SimBudget& budget) {
  budget.charge(theta.id);
  const auto f = model.forward(theta.values, lambda);
  return model.log_likelihood_given(y, f, lambda);
}

Dual log_likelihood(const Model& model, std::span<const Dual> y, const Theta& theta, std::span<const Dual> lambda,
                    SimBudget& budget) {
  budget.charge(theta.id);
  const auto f = model.forward(theta.values, lambda);
  return model.log_likelihood_given(y, f, lambda);
}

}  // namespace gradeig
