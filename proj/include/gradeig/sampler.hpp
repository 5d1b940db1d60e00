#pragma once

// Posterior samplers: coordinate-wise slice sampling (stepping out plus
// shrinkage), adaptive random-walk Metropolis-Hastings, and exact draws for
// models that provide them.
//
// Chains start at the supplied state and keep every `thinning`-th state;
// there is no burn-in. When the initial state is an exact posterior draw
// (as in the gradient estimators, where the initial state is the parameter
// that generated the data) the chain starts in stationarity.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gradeig/model.hpp"
#include "gradeig/rng.hpp"

namespace gradeig {

enum class SamplerKind { slice, adaptive_mh, exact };

SamplerKind parse_sampler_kind(const std::string& s);
std::string to_string(SamplerKind k);

struct SamplerConfig {
  SamplerKind kind = SamplerKind::slice;
  std::size_t thinning = 1;
  std::size_t n_samples = 1;
  /// Slice bracket width; <= 0 selects the model's per-coordinate scales.
  double slice_width = 0.0;
  std::size_t slice_max_stepout = 32;
  /// Accepted proposals before the MH proposal switches to the adapted covariance.
  std::size_t mh_adapt_start = 20;

  void validate() const;
};

struct Chain {
  std::vector<std::vector<double>> draws;
  double accept_rate = 1.0;
  std::size_t thinning = 1;
  std::uint64_t n_target_evals = 0;
  /// Target evaluations that required a forward simulation (inside prior support).
  std::uint64_t forward_evals = 0;
};

class ChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using LogTarget = std::function<double(std::span<const double>)>;

struct SliceResult {
  double x;
  double log_density;
  std::uint64_t evals;
};

/// One univariate slice-sampling update (Neal 2003: stepping out with at
/// most `max_stepout` bracket widths, then shrinkage). `log_f_x0` must be
/// log_f(x0) and finite.
SliceResult slice_update_1d(const std::function<double(double)>& log_f, double x0, double log_f_x0, double width,
                            std::size_t max_stepout, Rng& rng);

/// Adaptive random-walk Metropolis with a streaming covariance estimate.
class AdaptiveMh {
 public:
  AdaptiveMh(std::span<const double> init, double log_target_init, std::size_t adapt_start);

  /// One proposal plus Metropolis accept/reject. Returns true on acceptance.
  bool step(const LogTarget& log_target, Rng& rng);

  const std::vector<double>& state() const noexcept { return x_; }
  double log_target() const noexcept { return log_p_; }
  std::uint64_t proposals() const noexcept { return proposals_; }
  std::uint64_t accepted() const noexcept { return accepted_; }
  bool adapted() const noexcept { return accepted_ >= adapt_start_; }
  /// Empirical covariance of visited states (row-major D x D).
  std::vector<double> covariance() const;
  /// Covariance currently used for proposals (row-major D x D).
  std::vector<double> proposal_covariance() const;

 private:
  void absorb(std::span<const double> x);

  std::vector<double> x_;
  double log_p_;
  std::size_t adapt_start_;
  std::uint64_t proposals_ = 0;
  std::uint64_t accepted_ = 0;
  std::uint64_t n_seen_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;  // row-major co-moment
};

/// Runs a chain on an arbitrary log target. `scales` gives per-coordinate
/// slice widths when cfg.slice_width <= 0. `exact` is not valid here.
Chain run_chain(const LogTarget& log_target, std::span<const double> init, const SamplerConfig& cfg,
                std::span<const double> scales, Rng& rng);

/// Samples q(theta | y, lambda) for `model`, in the model's sampler
/// parameterization, and returns draws in parameter space. For kind == exact
/// this delegates to the model's exact posterior sampler.
Chain sample_posterior(const Model& model, std::span<const double> y, std::span<const double> lambda,
                       std::span<const double> init_theta, const SamplerConfig& cfg, Rng& rng);

}  // namespace gradeig
