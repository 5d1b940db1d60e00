#pragma once

// Design-quality checks: large-sample NMC EIG, KDE posterior-entropy scores,
// and the estimator bias study on the linear model.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gradeig/eig_est.hpp"
#include "gradeig/model.hpp"
#include "gradeig/rng.hpp"
#include "gradeig/sampler.hpp"

namespace gradeig {

struct EntropyReport {
  double mean_entropy = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::size_t kde_samples = 0;
  /// Per-dimension bandwidths averaged over trials.
  std::vector<double> bandwidths;
  std::vector<double> entropies;
  EntropySpace space = EntropySpace::raw;
};

/// For each trial: theta* ~ prior, y = g(theta*, eps, lambda), kde_n posterior
/// draws from a chain started at theta*, resubstitution KDE entropy in the
/// model's entropy space. Trial t uses stream.child(t).
EntropyReport posterior_entropy(const Model& model, std::span<const double> lambda, std::size_t trials,
                                const SamplerConfig& sampler, std::size_t kde_n, const RngStream& stream);

inline constexpr std::size_t kNmcValidateDefault = 2000;

EigEstimate nmc_validate(const Model& model, std::span<const double> lambda, const RngStream& stream,
                         std::size_t M = kNmcValidateDefault, std::size_t N = kNmcValidateDefault);

struct BiasStudyConfig {
  double sigma2 = 0.01;
  std::size_t design_dim = 3;
  std::size_t n_designs = 20;
  std::size_t replicates = 100;
  std::size_t beeg_M = 100;
  /// UEEG with exact posterior draws: M outer samples x N draws; cost M (1 + N).
  std::size_t ueeg_exact_M = 10;
  std::size_t ueeg_exact_N = 9;
  bool include_slice = true;
  /// UEEG with a slice chain; cost is M x chain evaluations.
  std::size_t ueeg_slice_M = 1;
  SamplerConfig ueeg_slice_sampler{SamplerKind::slice, 6, 1, 0.0, 32, 20};
  std::size_t pce_M = 100;
  std::size_t pce_N = 100;

  void validate() const;
};

struct BiasRow {
  std::size_t design_id = 0;
  std::vector<double> lambda;
  double oracle_eig = 0.0;
  std::vector<double> oracle_grad;
  std::string estimator;
  std::vector<double> mean_grad;
  std::vector<double> bias;
  double bias_norm = 0.0;
  /// Standard errors of the replicate-mean gradient, per component.
  std::vector<double> se_components;
  /// sqrt(sum_k se_k^2): the scale of bias_norm under zero bias.
  double se = 0.0;
  double mean_forward_evals = 0.0;
};

struct BiasReport {
  std::vector<BiasRow> rows;
  std::vector<BiasRow> rows_for(const std::string& estimator) const;
};

/// Runs every estimator at n_designs designs ~ U[-1, 1]^n on the linear model
/// and compares replicate-mean gradients with the closed-form gradient.
BiasReport bias_study(const BiasStudyConfig& cfg, const RngStream& stream);

}  // namespace gradeig
