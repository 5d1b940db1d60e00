#pragma once

// Projected stochastic gradient ascent on the design.
//
// Each iteration asks a gradient source for an EIG-gradient estimate, takes
// an SGD or Adam ascent step and clips the result to the design box. The
// loop stops after max_steps iterations or once the cumulative forward
// evaluation count reaches max_forward_evals (so it overshoots by at most
// one step's cost).

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gradeig/design.hpp"
#include "gradeig/grad_est.hpp"
#include "gradeig/model.hpp"
#include "gradeig/sampler.hpp"

namespace gradeig {

enum class EstimatorKind { ueeg_mcmc, beeg_ap, pce };
enum class StepRuleKind { sgd, adam };

EstimatorKind parse_estimator_kind(const std::string& s);
std::string to_string(EstimatorKind k);
StepRuleKind parse_step_rule(const std::string& s);
std::string to_string(StepRuleKind k);

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::beeg_ap;
  std::size_t M = 100;
  /// Contrastive draws per outer sample (PCE only).
  std::size_t N = 10;
  SamplerConfig sampler;
  /// BEEG-AP: reuse one atomic batch for the whole run instead of a fresh batch per step.
  bool fixed_atoms = false;
  /// UEEG-MCMC: budget accounting for the posterior chains.
  ChainCost chain_cost = ChainCost::target_evals;

  void validate() const;
};

struct OptimConfig {
  EstimatorConfig estimator;
  StepRuleKind step_rule = StepRuleKind::adam;
  double learning_rate = 1e-2;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t max_forward_evals = 20000;
  std::size_t max_steps = 1000000;
  std::uint64_t seed = 0;
  /// Wall-clock timings make trajectories differ run to run; off by default.
  bool record_wall_time = false;

  void validate() const;
};

struct TrajectoryRecord {
  std::size_t step = 0;
  std::vector<double> lambda;
  double grad_norm = 0.0;
  std::uint64_t forward_evals = 0;
  double wall_ms = 0.0;
};

struct StepFailure {
  std::size_t step;
  std::string message;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  std::vector<StepFailure> failures;

  const std::vector<double>& final_design() const { return records.back().lambda; }
};

class OptimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// First-order update rule; returns the ascent displacement for a gradient.
class StepRule {
 public:
  StepRule(StepRuleKind kind, double lr, std::size_t dim, double beta1 = 0.9, double beta2 = 0.999,
           double eps = 1e-8);
  std::vector<double> step(std::span<const double> grad);

 private:
  StepRuleKind kind_;
  double lr_, beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
  std::size_t t_ = 0;
};

using GradientSource = std::function<GradEstimate(std::span<const double> lambda, std::size_t step, SimBudget& budget)>;

/// Gradient source backed by one of the estimators, randomness keyed by (seed, step).
GradientSource make_gradient_source(const Model& model, const EstimatorConfig& cfg, std::uint64_t seed);

/// Uniform starting design in the model's box, drawn from stream `init` of `seed`.
Design initial_design(const Model& model, std::uint64_t seed);

Trajectory optimize(const Model& model, const Design& start, const OptimConfig& cfg);
Trajectory optimize(const Design& start, const OptimConfig& cfg, const GradientSource& gradient);

}  // namespace gradeig
