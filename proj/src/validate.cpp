#include "gradeig/validate.hpp"

#include <cmath>
#include <stdexcept>

#include "gradeig/grad_est.hpp"
#include "gradeig/kde.hpp"
#include "gradeig/models/linear.hpp"
#include "gradeig/parallel.hpp"

namespace gradeig {

EntropyReport posterior_entropy(const Model& model, std::span<const double> lambda, std::size_t trials,
                                const SamplerConfig& sampler, std::size_t kde_n, const RngStream& stream) {
  if (trials == 0) throw std::invalid_argument("posterior_entropy: trials must be >= 1");
  if (kde_n < 2) throw std::invalid_argument("posterior_entropy: kde_n must be >= 2");
  SamplerConfig cfg = sampler;
  cfg.n_samples = kde_n;
  cfg.validate();

  EntropyReport report;
  report.trials = trials;
  report.kde_samples = kde_n;
  report.space = model.entropy_space();
  report.entropies.assign(trials, 0.0);
  std::vector<std::vector<double>> bw(trials);

  // Trials run one after another; each chain's inner work is sequential, so
  // parallelize over trials instead.
  parallel_for(trials, [&](std::size_t t) {
    Rng rng = stream.child(t).engine();
    const auto theta = model.sample_prior_values(rng);
    const auto noise = model.sample_noise(rng);
    const auto y = model.observe(model.forward(theta, lambda), noise, lambda);
    Chain chain = sample_posterior(model, y, lambda, theta, cfg, rng);
    if (report.space == EntropySpace::log) {
      for (auto& d : chain.draws) {
        for (double& v : d) v = std::log(v);
      }
    }
    GaussianKde kde(chain.draws);
    report.entropies[t] = kde.resubstitution_entropy();
    bw[t] = kde.bandwidths();
  });

  double sum = 0.0;
  for (double h : report.entropies) sum += h;
  report.mean_entropy = sum / static_cast<double>(trials);
  if (trials > 1) {
    double ss = 0.0;
    for (double h : report.entropies) ss += (h - report.mean_entropy) * (h - report.mean_entropy);
    report.std_error = std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials));
  }
  report.bandwidths.assign(bw.front().size(), 0.0);
  for (const auto& b : bw) {
    for (std::size_t d = 0; d < b.size(); ++d) report.bandwidths[d] += b[d] / static_cast<double>(trials);
  }
  return report;
}

EigEstimate nmc_validate(const Model& model, std::span<const double> lambda, const RngStream& stream, std::size_t M,
                         std::size_t N) {
  SimBudget budget;
  return nmc_value(model, lambda, M, N, stream, budget);
}

void BiasStudyConfig::validate() const {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("bias_study: sigma2 must be positive");
  if (design_dim == 0 || n_designs == 0) throw std::invalid_argument("bias_study: empty design set");
  if (replicates < 2) throw std::invalid_argument("bias_study: need at least 2 replicates");
  if (beeg_M < 2 || ueeg_exact_M == 0 || ueeg_exact_N == 0 || pce_M == 0) {
    throw std::invalid_argument("bias_study: sample sizes must be positive (beeg_M >= 2)");
  }
  if (include_slice) {
    if (ueeg_slice_M == 0) throw std::invalid_argument("bias_study: ueeg_slice_M must be positive");
    ueeg_slice_sampler.validate();
  }
}

std::vector<BiasRow> BiasReport::rows_for(const std::string& estimator) const {
  std::vector<BiasRow> out;
  for (const auto& r : rows) {
    if (r.estimator == estimator) out.push_back(r);
  }
  return out;
}

namespace {

using Estimator = std::function<GradEstimate(std::span<const double>, const RngStream&, SimBudget&)>;

BiasRow summarize_replicates(const std::vector<GradEstimate>& reps, const models::EigWithGradient& oracle) {
  const std::size_t d = oracle.gradient.size();
  const double R = static_cast<double>(reps.size());
  BiasRow row;
  row.oracle_eig = oracle.value;
  row.oracle_grad = oracle.gradient;
  row.mean_grad.assign(d, 0.0);
  for (const auto& g : reps) {
    for (std::size_t k = 0; k < d; ++k) row.mean_grad[k] += g.gradient[k] / R;
    row.mean_forward_evals += static_cast<double>(g.forward_evals_used) / R;
  }
  row.se_components.assign(d, 0.0);
  for (const auto& g : reps) {
    for (std::size_t k = 0; k < d; ++k) {
      const double e = g.gradient[k] - row.mean_grad[k];
      row.se_components[k] += e * e;
    }
  }
  double se2 = 0.0, b2 = 0.0;
  row.bias.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    row.se_components[k] = std::sqrt(row.se_components[k] / (R - 1.0) / R);
    se2 += row.se_components[k] * row.se_components[k];
    row.bias[k] = row.mean_grad[k] - oracle.gradient[k];
    b2 += row.bias[k] * row.bias[k];
  }
  row.bias_norm = std::sqrt(b2);
  row.se = std::sqrt(se2);
  return row;
}

}  // namespace

BiasReport bias_study(const BiasStudyConfig& cfg, const RngStream& stream) {
  cfg.validate();
  const models::LinearModel model(cfg.design_dim, cfg.sigma2);

  std::vector<std::pair<std::string, Estimator>> estimators;
  estimators.emplace_back("beeg_ap", [&](std::span<const double> l, const RngStream& s, SimBudget& b) {
    return beeg_ap_gradient(model, l, cfg.beeg_M, s, b);
  });
  const SamplerConfig exact{SamplerKind::exact, 1, cfg.ueeg_exact_N, 0.0, 32, 20};
  estimators.emplace_back("ueeg_exact", [&, exact](std::span<const double> l, const RngStream& s, SimBudget& b) {
    return ueeg_mcmc_gradient(model, l, cfg.ueeg_exact_M, exact, s, b);
  });
  if (cfg.include_slice) {
    estimators.emplace_back("ueeg_slice", [&](std::span<const double> l, const RngStream& s, SimBudget& b) {
      return ueeg_mcmc_gradient(model, l, cfg.ueeg_slice_M, cfg.ueeg_slice_sampler, s, b);
    });
  }
  estimators.emplace_back("pce", [&](std::span<const double> l, const RngStream& s, SimBudget& b) {
    return pce_gradient(model, l, cfg.pce_M, cfg.pce_N, s, b);
  });

  Rng design_rng = stream.child("designs").engine();
  const Box box = Box::uniform(cfg.design_dim, -1.0, 1.0);

  BiasReport report;
  for (std::size_t id = 0; id < cfg.n_designs; ++id) {
    const std::vector<double> lambda = box.sample_uniform(design_rng);
    const auto oracle = models::linear_eig_oracle(lambda, cfg.sigma2);
    for (const auto& [name, est] : estimators) {
      const RngStream s = stream.child(name).child(id);
      std::vector<GradEstimate> reps(cfg.replicates);
      for (std::size_t r = 0; r < cfg.replicates; ++r) {
        SimBudget budget;
        reps[r] = est(lambda, s.child(r), budget);
      }
      BiasRow row = summarize_replicates(reps, oracle);
      row.design_id = id;
      row.lambda = lambda;
      row.estimator = name;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace gradeig
