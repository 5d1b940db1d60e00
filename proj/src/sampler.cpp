#include "gradeig/sampler.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gradeig {

SamplerKind parse_sampler_kind(const std::string& s) {
  if (s == "slice") return SamplerKind::slice;
  if (s == "adaptive_mh") return SamplerKind::adaptive_mh;
  if (s == "exact") return SamplerKind::exact;
  throw std::invalid_argument("unknown sampler kind '" + s + "' (expected slice, adaptive_mh or exact)");
}

std::string to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::slice:
      return "slice";
    case SamplerKind::adaptive_mh:
      return "adaptive_mh";
    case SamplerKind::exact:
      return "exact";
  }
  return "?";
}

void SamplerConfig::validate() const {
  if (thinning == 0) throw std::invalid_argument("sampler.thinning must be positive");
  if (n_samples == 0) throw std::invalid_argument("sampler.n_samples must be positive");
  if (mh_adapt_start == 0) throw std::invalid_argument("sampler.mh_adapt_start must be positive");
  if (slice_max_stepout == 0) throw std::invalid_argument("sampler.slice_max_stepout must be positive");
  if (!std::isfinite(slice_width)) throw std::invalid_argument("sampler.slice_width must be finite");
}

SliceResult slice_update_1d(const std::function<double(double)>& log_f, double x0, double log_f_x0, double width,
                            std::size_t max_stepout, Rng& rng) {
  if (!std::isfinite(log_f_x0)) throw ChainError("slice_update_1d: log density at x0 is not finite");
  if (!(width > 0.0)) throw std::invalid_argument("slice_update_1d: width must be positive");
  std::uint64_t evals = 0;
  auto f = [&](double x) {
    ++evals;
    return log_f(x);
  };

  const double log_level = log_f_x0 + std::log(uniform01(rng));
  double left = x0 - width * uniform01(rng);
  double right = left + width;
  const std::size_t j_max = static_cast<std::size_t>(std::floor(static_cast<double>(max_stepout) * uniform01(rng)));
  std::size_t j = std::min(j_max, max_stepout - 1);
  std::size_t k = (max_stepout - 1) - j;
  while (j > 0 && f(left) > log_level) {
    left -= width;
    --j;
  }
  while (k > 0 && f(right) > log_level) {
    right += width;
    --k;
  }

  for (int iter = 0; iter < 1000; ++iter) {
    const double x1 = left + uniform01(rng) * (right - left);
    const double lp = f(x1);
    if (lp >= log_level) return {x1, lp, evals};
    if (x1 < x0) {
      left = x1;
    } else {
      right = x1;
    }
    if (right - left <= 1e-15 * std::max(1.0, std::abs(x0))) break;
  }
  return {x0, log_f_x0, evals};
}

AdaptiveMh::AdaptiveMh(std::span<const double> init, double log_target_init, std::size_t adapt_start)
    : x_(init.begin(), init.end()),
      log_p_(log_target_init),
      adapt_start_(adapt_start),
      mean_(init.size(), 0.0),
      m2_(init.size() * init.size(), 0.0) {
  if (!std::isfinite(log_target_init)) throw ChainError("AdaptiveMh: log target at initial state is not finite");
  absorb(x_);
}

void AdaptiveMh::absorb(std::span<const double> x) {
  const std::size_t d = x.size();
  ++n_seen_;
  std::vector<double> delta(d);
  for (std::size_t a = 0; a < d; ++a) {
    delta[a] = x[a] - mean_[a];
    mean_[a] += delta[a] / static_cast<double>(n_seen_);
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) m2_[a * d + b] += delta[a] * (x[b] - mean_[b]);
  }
}

std::vector<double> AdaptiveMh::covariance() const {
  const std::size_t d = x_.size();
  std::vector<double> cov(d * d, 0.0);
  if (n_seen_ < 2) {
    for (std::size_t a = 0; a < d; ++a) cov[a * d + a] = 0.01;
    return cov;
  }
  for (std::size_t i = 0; i < d * d; ++i) cov[i] = m2_[i] / static_cast<double>(n_seen_ - 1);
  return cov;
}

std::vector<double> AdaptiveMh::proposal_covariance() const {
  const std::size_t d = x_.size();
  if (!adapted()) {
    std::vector<double> cov(d * d, 0.0);
    for (std::size_t a = 0; a < d; ++a) cov[a * d + a] = 0.01;
    return cov;
  }
  std::vector<double> cov = covariance();
  const double scale = 2.38 * 2.38 / static_cast<double>(d);
  for (double& c : cov) c *= scale;
  for (std::size_t a = 0; a < d; ++a) cov[a * d + a] += 1e-6;
  return cov;
}

bool AdaptiveMh::step(const LogTarget& log_target, Rng& rng) {
  const std::size_t d = x_.size();
  const std::vector<double> cov = proposal_covariance();
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> c(
      cov.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const Eigen::LLT<Eigen::MatrixXd> llt(c);
  Eigen::VectorXd z(static_cast<Eigen::Index>(d));
  for (std::size_t a = 0; a < d; ++a) z(static_cast<Eigen::Index>(a)) = standard_normal(rng);
  const Eigen::VectorXd step = llt.matrixL() * z;

  std::vector<double> proposal(d);
  for (std::size_t a = 0; a < d; ++a) proposal[a] = x_[a] + step(static_cast<Eigen::Index>(a));
  ++proposals_;
  const double lp = log_target(proposal);
  bool accept = false;
  if (std::isfinite(lp)) {
    const double log_ratio = lp - log_p_;
    accept = log_ratio >= 0.0 || std::log(uniform01(rng)) < log_ratio;
  }
  if (accept) {
    x_ = std::move(proposal);
    log_p_ = lp;
    ++accepted_;
  }
  absorb(x_);
  return accept;
}

Chain run_chain(const LogTarget& log_target, std::span<const double> init, const SamplerConfig& cfg,
                std::span<const double> scales, Rng& rng) {
  cfg.validate();
  if (cfg.kind == SamplerKind::exact) throw std::invalid_argument("run_chain: exact sampling needs a model");
  Chain chain;
  chain.thinning = cfg.thinning;
  chain.draws.reserve(cfg.n_samples);

  std::vector<double> x(init.begin(), init.end());
  double lp = log_target(x);
  chain.n_target_evals = 1;
  if (!std::isfinite(lp)) throw ChainError("run_chain: log target at the initial state is not finite");

  if (cfg.kind == SamplerKind::slice) {
    const std::size_t d = x.size();
    std::vector<double> widths(d);
    for (std::size_t k = 0; k < d; ++k) {
      widths[k] = cfg.slice_width > 0.0 ? cfg.slice_width : (k < scales.size() ? scales[k] : 1.0);
    }
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t s = 0; s < cfg.n_samples; ++s) {
      for (std::size_t t = 0; t < cfg.thinning; ++t) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t k : order) {
          const double keep = x[k];
          auto slice = [&](double v) {
            x[k] = v;
            const double r = log_target(x);
            x[k] = keep;
            return r;
          };
          const SliceResult r = slice_update_1d(slice, keep, lp, widths[k], cfg.slice_max_stepout, rng);
          chain.n_target_evals += r.evals;
          x[k] = r.x;
          lp = r.log_density;
        }
      }
      chain.draws.push_back(x);
    }
    chain.accept_rate = 1.0;
  } else {
    AdaptiveMh mh(x, lp, cfg.mh_adapt_start);
    for (std::size_t s = 0; s < cfg.n_samples; ++s) {
      for (std::size_t t = 0; t < cfg.thinning; ++t) mh.step(log_target, rng);
      chain.draws.push_back(mh.state());
    }
    chain.n_target_evals += mh.proposals();
    chain.accept_rate = static_cast<double>(mh.accepted()) / static_cast<double>(mh.proposals());
  }
  chain.forward_evals = chain.n_target_evals;
  return chain;
}

Chain sample_posterior(const Model& model, std::span<const double> y, std::span<const double> lambda,
                       std::span<const double> init_theta, const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  if (cfg.kind == SamplerKind::exact) {
    Chain chain;
    chain.thinning = 1;
    for (std::size_t s = 0; s < cfg.n_samples; ++s) chain.draws.push_back(model.sample_exact_posterior(y, lambda, rng));
    return chain;
  }

  const std::vector<CoordinateTransform> tr = model.sampler_transforms();
  const std::size_t d = model.theta_dim();
  std::vector<double> theta(d);
  std::uint64_t forward_evals = 0;
  auto to_theta = [&](std::span<const double> z) {
    for (std::size_t k = 0; k < d; ++k) theta[k] = tr[k].from_unconstrained(z[k]);
  };
  LogTarget target = [&](std::span<const double> z) {
    to_theta(z);
    const double lp = model.log_prior(theta);
    if (!std::isfinite(lp)) return -std::numeric_limits<double>::infinity();
    double jac = 0.0;
    for (std::size_t k = 0; k < d; ++k) jac += tr[k].log_jacobian(z[k]);
    ++forward_evals;
    const auto f = model.forward(theta, lambda);
    const double ll = model.log_likelihood_given(y, f, lambda);
    const double total = lp + jac + ll;
    return std::isnan(total) ? -std::numeric_limits<double>::infinity() : total;
  };

  std::vector<double> z0(d);
  for (std::size_t k = 0; k < d; ++k) z0[k] = tr[k].to_unconstrained(init_theta[k]);
  Chain chain = run_chain(target, z0, cfg, model.sampler_scales(), rng);
  for (auto& draw : chain.draws) {
    for (std::size_t k = 0; k < d; ++k) draw[k] = tr[k].from_unconstrained(draw[k]);
  }
  chain.forward_evals = forward_evals;
  return chain;
}

}  // namespace gradeig
