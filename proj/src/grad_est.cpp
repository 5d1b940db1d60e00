#include "gradeig/grad_est.hpp"

#include <cmath>
#include <limits>

#include "gradeig/parallel.hpp"
#include "gradeig/simd/kernels.hpp"

namespace gradeig {

double softmax_weights(std::span<const double> logits, std::span<double> weights) {
  const auto& k = simd::kernels();
  const double m = k.max_value(logits.data(), logits.size());
  if (m == -std::numeric_limits<double>::infinity()) throw EstimatorError("softmax_weights: all logits are -inf");
  for (std::size_t j = 0; j < logits.size(); ++j) weights[j] = logits[j] - m;
  k.exp_into(weights.data(), weights.data(), weights.size());
  double s = 0.0;
  for (double w : weights) s += w;
  const double inv = 1.0 / s;
  for (double& w : weights) w *= inv;
  return m + std::log(s);
}

ChainCost parse_chain_cost(const std::string& s) {
  if (s == "target_evals") return ChainCost::target_evals;
  if (s == "retained_draws") return ChainCost::retained_draws;
  throw std::invalid_argument("unknown chain cost '" + s + "' (expected target_evals or retained_draws)");
}

std::string to_string(ChainCost c) { return c == ChainCost::target_evals ? "target_evals" : "retained_draws"; }

namespace {

std::vector<double> mean_of_rows(const std::vector<std::vector<double>>& rows, std::size_t d) {
  std::vector<double> acc(d, 0.0);
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < d; ++k) acc[k] += r[k];
  }
  for (double& a : acc) a /= static_cast<double>(rows.size());
  return acc;
}

void require_finite(const std::vector<double>& g, const char* who) {
  for (double v : g) {
    if (!std::isfinite(v)) throw EstimatorError(std::string(who) + ": nonfinite gradient");
  }
}

}  // namespace

GradEstimate ueeg_mcmc_gradient(const Model& model, std::span<const double> lambda, std::size_t M,
                                const SamplerConfig& sampler, const RngStream& stream, SimBudget& budget,
                                ChainCost cost_rule) {
  if (M == 0) throw std::invalid_argument("ueeg_mcmc_gradient: M must be >= 1");
  sampler.validate();
  const std::size_t d = lambda.size();
  const auto lifted = lift_design(lambda);

  std::vector<std::vector<double>> per_i(M);
  std::vector<std::uint64_t> cost(M, 0);
  std::vector<Theta> outer(M);
  parallel_for(M, [&](std::size_t i) {
    Rng rng = stream.child(i).engine();
    const Theta theta = model.sample_prior(rng);
    const auto eps = model.sample_noise(rng);
    const auto f = model.forward(theta.values, std::span<const Dual>(lifted));
    const auto y = model.observe(f, eps, lifted);
    const Dual own = model.log_likelihood_given(y, f, lifted);
    const auto y_values = values_of(y);

    Chain chain;
    try {
      chain = sample_posterior(model, y_values, lambda, theta.values, sampler, rng);
    } catch (const std::exception& e) {
      throw EstimatorError("posterior chain failed for outer sample " + std::to_string(i) + ": " + e.what());
    }
    // The chain's first evaluation is theta itself, already paid for.
    if (cost_rule == ChainCost::retained_draws) {
      cost[i] = std::max<std::uint64_t>(1, chain.draws.size());
    } else {
      cost[i] = sampler.kind == SamplerKind::exact ? 1 + chain.draws.size() : std::max<std::uint64_t>(1, chain.forward_evals);
    }

    std::vector<double> g(own.tangent().begin(), own.tangent().end());
    const double inv_n = 1.0 / static_cast<double>(chain.draws.size());
    for (const auto& draw : chain.draws) {
      const auto fd = model.forward(draw, std::span<const Dual>(lifted));
      const Dual l = model.log_likelihood_given(y, fd, lifted);
      simd::kernels().axpy(-inv_n, l.tangent().data(), g.data(), d);
    }
    per_i[i] = std::move(g);
    outer[i] = theta;
  });
  for (const Theta& t : outer) budget.charge(t.id);
  std::uint64_t total = M;
  for (std::uint64_t c : cost) {
    budget.charge_fresh(c - 1);
    total += c - 1;
  }

  GradEstimate est;
  est.gradient = mean_of_rows(per_i, d);
  require_finite(est.gradient, "ueeg_mcmc_gradient");
  est.outer_M = M;
  est.inner_N = sampler.n_samples;
  est.forward_evals_used = total;
  return est;
}

GradEstimate beeg_ap_gradient(const Model& model, std::span<const double> lambda, std::size_t M,
                              const RngStream& stream, SimBudget& budget) {
  if (M == 0) throw std::invalid_argument("beeg_ap_gradient: M must be >= 1");
  return beeg_ap_gradient(model, lambda, draw_batch(model, M, stream), budget);
}

GradEstimate beeg_ap_gradient(const Model& model, std::span<const double> lambda, const PriorBatch& batch,
                              SimBudget& budget) {
  const std::size_t M = batch.size();
  if (M == 0) throw std::invalid_argument("beeg_ap_gradient: empty batch");
  const std::size_t d = lambda.size();
  const auto lifted = lift_design(lambda);
  const std::uint64_t before = budget.forward_evals();
  for (const Theta& t : batch.thetas) budget.charge(t.id);

  std::vector<std::vector<Dual>> f(M);
  parallel_for(M, [&](std::size_t j) { f[j] = model.forward(batch.thetas[j].values, std::span<const Dual>(lifted)); });

  std::vector<std::vector<double>> per_i(M);
  parallel_for(M, [&](std::size_t i) {
    const auto y = model.observe(f[i], batch.noises[i], lifted);
    std::vector<Dual> row(M);
    std::vector<double> logits(M), w(M);
    for (std::size_t j = 0; j < M; ++j) {
      row[j] = model.log_likelihood_given(y, f[j], lifted);
      logits[j] = row[j].value();
    }
    try {
      softmax_weights(logits, w);
    } catch (const EstimatorError&) {
      throw EstimatorError("beeg_ap_gradient: no atom explains observation " + std::to_string(i));
    }
    // sum_j w_ij (grad L_ii - grad L_ij) = grad L_ii - sum_j w_ij grad L_ij
    std::vector<double> g(row[i].tangent().begin(), row[i].tangent().end());
    for (std::size_t j = 0; j < M; ++j) {
      if (w[j] != 0.0) simd::kernels().axpy(-w[j], row[j].tangent().data(), g.data(), d);
    }
    per_i[i] = std::move(g);
  });

  GradEstimate est;
  est.gradient = mean_of_rows(per_i, d);
  require_finite(est.gradient, "beeg_ap_gradient");
  est.outer_M = M;
  est.inner_N = M;
  est.forward_evals_used = budget.forward_evals() - before;
  return est;
}

GradEstimate pce_gradient(const Model& model, std::span<const double> lambda, std::size_t M, std::size_t N,
                          const RngStream& stream, SimBudget& budget) {
  if (M == 0) throw std::invalid_argument("pce_gradient: M must be >= 1");
  return pce_gradient(model, lambda, draw_contrast_batch(model, M, N, stream), budget);
}

GradEstimate pce_gradient(const Model& model, std::span<const double> lambda, const ContrastBatch& batch,
                          SimBudget& budget) {
  const std::uint64_t before = budget.forward_evals();
  const auto lifted = lift_design(lambda);
  const Dual u = pce_objective(model, lifted, batch, budget);
  GradEstimate est;
  est.gradient = gradient_of(u);
  require_finite(est.gradient, "pce_gradient");
  est.outer_M = batch.outer.size();
  est.inner_N = batch.contrast.empty() ? 0 : batch.contrast.front().size();
  est.forward_evals_used = budget.forward_evals() - before;
  return est;
}

}  // namespace gradeig
