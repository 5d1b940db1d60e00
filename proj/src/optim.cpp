#include "gradeig/optim.hpp"

#include <chrono>
#include <cmath>
#include <memory>

namespace gradeig {

EstimatorKind parse_estimator_kind(const std::string& s) {
  if (s == "ueeg_mcmc") return EstimatorKind::ueeg_mcmc;
  if (s == "beeg_ap") return EstimatorKind::beeg_ap;
  if (s == "pce") return EstimatorKind::pce;
  throw std::invalid_argument("unknown estimator '" + s + "' (expected ueeg_mcmc, beeg_ap or pce)");
}

std::string to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::ueeg_mcmc:
      return "ueeg_mcmc";
    case EstimatorKind::beeg_ap:
      return "beeg_ap";
    case EstimatorKind::pce:
      return "pce";
  }
  return "?";
}

StepRuleKind parse_step_rule(const std::string& s) {
  if (s == "sgd") return StepRuleKind::sgd;
  if (s == "adam") return StepRuleKind::adam;
  throw std::invalid_argument("unknown step rule '" + s + "' (expected sgd or adam)");
}

std::string to_string(StepRuleKind k) { return k == StepRuleKind::sgd ? "sgd" : "adam"; }

void EstimatorConfig::validate() const {
  if (M == 0) throw std::invalid_argument("estimator.M must be positive");
  if (kind == EstimatorKind::ueeg_mcmc) sampler.validate();
}

void OptimConfig::validate() const {
  estimator.validate();
  if (!(learning_rate > 0.0)) throw std::invalid_argument("optim.learning_rate must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw std::invalid_argument("optim.adam_betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw std::invalid_argument("optim.adam_eps must be positive");
  if (max_forward_evals == 0) throw std::invalid_argument("optim.max_forward_evals must be positive");
  if (max_steps == 0) throw std::invalid_argument("optim.max_steps must be positive");
}

StepRule::StepRule(StepRuleKind kind, double lr, std::size_t dim, double beta1, double beta2, double eps)
    : kind_(kind), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(dim, 0.0), v_(dim, 0.0) {}

std::vector<double> StepRule::step(std::span<const double> grad) {
  std::vector<double> delta(grad.size());
  if (kind_ == StepRuleKind::sgd) {
    for (std::size_t k = 0; k < grad.size(); ++k) delta[k] = lr_ * grad[k];
    return delta;
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < grad.size(); ++k) {
    m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * grad[k];
    v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * grad[k] * grad[k];
    delta[k] = lr_ * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + eps_);
  }
  return delta;
}

GradientSource make_gradient_source(const Model& model, const EstimatorConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const RngStream root = RngStream(seed).child("gradient");
  switch (cfg.kind) {
    case EstimatorKind::ueeg_mcmc:
      return [&model, cfg, root](std::span<const double> lambda, std::size_t step, SimBudget& budget) {
        return ueeg_mcmc_gradient(model, lambda, cfg.M, cfg.sampler, root.child(step), budget, cfg.chain_cost);
      };
    case EstimatorKind::beeg_ap:
      if (cfg.fixed_atoms) {
        auto atoms = std::make_shared<const PriorBatch>(draw_batch(model, cfg.M, root.child("atoms")));
        return [&model, atoms](std::span<const double> lambda, std::size_t, SimBudget& budget) {
          return beeg_ap_gradient(model, lambda, *atoms, budget);
        };
      }
      return [&model, cfg, root](std::span<const double> lambda, std::size_t step, SimBudget& budget) {
        return beeg_ap_gradient(model, lambda, cfg.M, root.child(step), budget);
      };
    case EstimatorKind::pce:
      return [&model, cfg, root](std::span<const double> lambda, std::size_t step, SimBudget& budget) {
        return pce_gradient(model, lambda, cfg.M, cfg.N, root.child(step), budget);
      };
  }
  throw std::logic_error("unhandled estimator kind");
}

Design initial_design(const Model& model, std::uint64_t seed) {
  Rng rng = RngStream(seed).child("init").engine();
  const Box box = model.design_box();
  return Design(box.sample_uniform(rng), box);
}

Trajectory optimize(const Model& model, const Design& start, const OptimConfig& cfg) {
  cfg.validate();
  return optimize(start, cfg, make_gradient_source(model, cfg.estimator, cfg.seed));
}

Trajectory optimize(const Design& start, const OptimConfig& cfg, const GradientSource& gradient) {
  cfg.validate();
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  auto elapsed_ms = [&] {
    return cfg.record_wall_time ? std::chrono::duration<double, std::milli>(Clock::now() - t0).count() : 0.0;
  };

  Trajectory traj;
  Design current = start;
  SimBudget budget;
  StepRule rule(cfg.step_rule, cfg.learning_rate, start.dim(), cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  traj.records.push_back({0, current.values(), 0.0, 0, elapsed_ms()});

  std::size_t consecutive_failures = 0;
  for (std::size_t step = 1; step <= cfg.max_steps && budget.forward_evals() < cfg.max_forward_evals; ++step) {
    budget.new_design_version();
    GradEstimate est;
    try {
      est = gradient(current.values(), step, budget);
    } catch (const std::exception& e) {
      traj.failures.push_back({step, e.what()});
      if (++consecutive_failures >= 5) {
        throw OptimError("optimize: 5 consecutive estimator failures, last at step " + std::to_string(step) + ": " +
                         e.what());
      }
      continue;
    }
    consecutive_failures = 0;
    const std::vector<double> delta = rule.step(est.gradient);
    std::vector<double> next = current.values();
    for (std::size_t k = 0; k < next.size(); ++k) next[k] += delta[k];
    current = current.moved_to(next);

    double norm = 0.0;
    for (double g : est.gradient) norm += g * g;
    traj.records.push_back({step, current.values(), std::sqrt(norm), budget.forward_evals(), elapsed_ms()});
  }
  return traj;
}

}  // namespace gradeig
