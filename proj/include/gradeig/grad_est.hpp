#pragma once

// Estimators of the design gradient of the expected information gain.
//
// All three lift the design to Dual numbers and differentiate through the
// sampling path y = g(theta, eps, lambda), so every gradient is a total
// derivative with respect to lambda.
//
//   ueeg_mcmc_gradient  mean over outer draws of
//                         grad log l(y_i | theta_i) - mean_j grad log l(y_i | theta'_ij)
//                       with theta'_ij from a posterior chain started at theta_i.
//                       Unbiased when the chain draws are exact posterior draws.
//   beeg_ap_gradient    posterior replaced by the batch-reweighted atomic prior;
//                       identical to the gradient of srNMC on the same batch.
//   pce_gradient        autodiff gradient of the PCE estimate.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gradeig/eig_est.hpp"
#include "gradeig/model.hpp"
#include "gradeig/sampler.hpp"

namespace gradeig {

struct GradEstimate {
  std::vector<double> gradient;
  std::size_t outer_M = 0;
  std::size_t inner_N = 0;
  std::uint64_t forward_evals_used = 0;
};

/// How a posterior chain is charged against the simulation budget.
///   target_evals    every log-target evaluation inside the prior support
///                   (exact sampler: 1 + N per outer sample)
///   retained_draws  one evaluation per kept draw, the accounting used in
///                   the toy-model tables of the original experiments
enum class ChainCost { target_evals, retained_draws };

ChainCost parse_chain_cost(const std::string& s);
std::string to_string(ChainCost c);

GradEstimate ueeg_mcmc_gradient(const Model& model, std::span<const double> lambda, std::size_t M,
                                const SamplerConfig& sampler, const RngStream& stream, SimBudget& budget,
                                ChainCost cost_rule = ChainCost::target_evals);

GradEstimate beeg_ap_gradient(const Model& model, std::span<const double> lambda, std::size_t M,
                              const RngStream& stream, SimBudget& budget);
/// BEEG-AP on a caller-supplied atomic batch.
GradEstimate beeg_ap_gradient(const Model& model, std::span<const double> lambda, const PriorBatch& batch,
                              SimBudget& budget);

GradEstimate pce_gradient(const Model& model, std::span<const double> lambda, std::size_t M, std::size_t N,
                          const RngStream& stream, SimBudget& budget);
GradEstimate pce_gradient(const Model& model, std::span<const double> lambda, const ContrastBatch& batch,
                          SimBudget& budget);

/// Normalized softmax weights of `logits` written into `weights`; returns the
/// log normalizer. Throws EstimatorError if every logit is -inf.
double softmax_weights(std::span<const double> logits, std::span<double> weights);

}  // namespace gradeig
