#pragma once

// Model interface for experimental design with a tractable likelihood.
//
// A model is split into a deterministic forward map f(theta, lambda), a
// noise map producing y = g(theta, eps, lambda) from f, and the likelihood
// l(y | theta, lambda) written in terms of f. Each of those comes in a
// double flavour and a Dual flavour; the Dual flavour carries derivatives
// with respect to the design.
//
// Simulation cost is the number of distinct forward evaluations. The free
// functions simulate() and log_likelihood() charge a SimBudget once per
// (theta identity, design version).

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <unordered_set>
#include <vector>

#include "gradeig/design.hpp"
#include "gradeig/dual.hpp"
#include "gradeig/rng.hpp"

namespace gradeig {

using ThetaId = std::uint64_t;

/// Process-wide monotone identity source for parameter draws.
ThetaId next_theta_id();

struct Theta {
  std::vector<double> values;
  ThetaId id = 0;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SimBudget {
 public:
  /// Charges one forward evaluation for `id` unless it was already charged
  /// for the current design version. Returns true when charged.
  bool charge(ThetaId id);
  /// Charges evaluations that have no reusable identity.
  void charge_fresh(std::uint64_t n = 1) noexcept { evals_ += n; }
  /// Invalidates the identity cache; call whenever the design changes.
  void new_design_version();
  std::uint64_t forward_evals() const noexcept { return evals_; }
  std::uint64_t design_version() const noexcept { return version_; }
  /// Adds another worker's count.
  void merge(const SimBudget& other) noexcept { evals_ += other.evals_; }

 private:
  std::uint64_t evals_ = 0;
  std::uint64_t version_ = 0;
  std::unordered_set<ThetaId> charged_;
};

/// Map between a bounded parameter coordinate and the unconstrained
/// coordinate used by the samplers.
struct CoordinateTransform {
  enum class Kind { identity, log, logit };
  Kind kind = Kind::identity;
  double lo = 0.0;
  double hi = 1.0;

  double to_unconstrained(double theta) const;
  double from_unconstrained(double z) const;
  /// log |d theta / d z| at z.
  double log_jacobian(double z) const;
};

enum class EntropySpace { raw, log };

class Model {
 public:
  virtual ~Model() = default;

  virtual std::string name() const = 0;
  virtual std::size_t theta_dim() const = 0;
  virtual std::size_t design_dim() const = 0;
  virtual std::size_t obs_dim() const = 0;
  virtual std::size_t noise_dim() const = 0;
  virtual Box design_box() const = 0;

  virtual std::vector<double> sample_prior_values(Rng& rng) const = 0;
  /// -inf outside the prior support.
  virtual double log_prior(std::span<const double> theta) const = 0;
  /// i.i.d. standard normal base noise; scales are applied inside observe().
  std::vector<double> sample_noise(Rng& rng) const;
  Theta sample_prior(Rng& rng) const { return {sample_prior_values(rng), next_theta_id()}; }

  virtual std::vector<double> forward(std::span<const double> theta, std::span<const double> lambda) const = 0;
  virtual std::vector<Dual> forward(std::span<const double> theta, std::span<const Dual> lambda) const = 0;

  virtual std::vector<double> observe(std::span<const double> f, std::span<const double> noise,
                                      std::span<const double> lambda) const = 0;
  virtual std::vector<Dual> observe(std::span<const Dual> f, std::span<const double> noise,
                                    std::span<const Dual> lambda) const = 0;

  /// log l(y | theta, lambda) given f = forward(theta, lambda). Never NaN;
  /// -inf (with zero tangent) when the density underflows.
  virtual double log_likelihood_given(std::span<const double> y, std::span<const double> f,
                                      std::span<const double> lambda) const = 0;
  virtual Dual log_likelihood_given(std::span<const Dual> y, std::span<const Dual> f,
                                    std::span<const Dual> lambda) const = 0;

  /// Per-coordinate sampler parameterization.
  virtual std::vector<CoordinateTransform> sampler_transforms() const;
  /// Slice widths / typical scales in the sampler parameterization.
  virtual std::vector<double> sampler_scales() const = 0;
  virtual EntropySpace entropy_space() const { return EntropySpace::raw; }
  /// Differential entropy of the prior in entropy_space(), when known.
  virtual std::optional<double> prior_entropy() const { return std::nullopt; }

  virtual bool has_exact_posterior() const { return false; }
  virtual std::vector<double> sample_exact_posterior(std::span<const double> y, std::span<const double> lambda,
                                                     Rng& rng) const;
};

// Budget-charging entry points.
std::vector<double> simulate(const Model& model, const Theta& theta, std::span<const double> noise,
                             std::span<const double> lambda, SimBudget& budget);
std::vector<Dual> simulate(const Model& model, const Theta& theta, std::span<const double> noise,
                           std::span<const Dual> lambda, SimBudget& budget);
double log_likelihood(const Model& model, std::span<const double> y, const Theta& theta,
                      std::span<const double> lambda, SimBudget& budget);
Dual log_likelihood(const Model& model, std::span<const Dual> y, const Theta& theta, std::span<const Dual> lambda,
                    SimBudget& budget);

/// Implements the double/Dual virtual pairs by forwarding to templates on
/// the derived class: forward_t<T>, observe_t<T>, log_likelihood_t<T>.
template <class Derived>
class ModelBase : public Model {
 public:
  std::vector<double> forward(std::span<const double> theta, std::span<const double> lambda) const override {
    return self().template forward_t<double>(theta, lambda);
  }
  std::vector<Dual> forward(std::span<const double> theta, std::span<const Dual> lambda) const override {
    return self().template forward_t<Dual>(theta, lambda);
  }
  std::vector<double> observe(std::span<const double> f, std::span<const double> noise,
                              std::span<const double> lambda) const override {
    return self().template observe_t<double>(f, noise, lambda);
  }
  std::vector<Dual> observe(std::span<const Dual> f, std::span<const double> noise,
                            std::span<const Dual> lambda) const override {
    return self().template observe_t<Dual>(f, noise, lambda);
  }
  double log_likelihood_given(std::span<const double> y, std::span<const double> f,
                              std::span<const double> lambda) const override {
    return self().template log_likelihood_t<double>(y, f, lambda);
  }
  Dual log_likelihood_given(std::span<const Dual> y, std::span<const Dual> f,
                            std::span<const Dual> lambda) const override {
    return self().template log_likelihood_t<Dual>(y, f, lambda);
  }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

/// Constant of the same kind as `like` (matching tangent length for Dual).
inline double constant_like(double, double v) { return v; }
inline Dual constant_like(const Dual& like, double v) { return Dual(v, like.dim()); }

/// Constant with `dim` tangents (ignored for double).
template <class T>
T make_constant(double v, std::size_t dim) {
  if constexpr (std::is_same_v<T, Dual>) {
    return Dual(v, dim);
  } else {
    (void)dim;
    return v;
  }
}

/// Replaces a nonfinite log-density by -inf with a zero tangent.
inline double finite_or_neg_inf(double v) {
  return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
}
inline Dual finite_or_neg_inf(const Dual& v) {
  if (std::isfinite(v.value())) {
    for (double t : v.tangent()) {
      if (!std::isfinite(t)) return Dual(-std::numeric_limits<double>::infinity(), v.dim());
    }
    return v;
  }
  return Dual(-std::numeric_limits<double>::infinity(), v.dim());
}

}  // namespace gradeig
