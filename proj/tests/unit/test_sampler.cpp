#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "gradeig/models/linear.hpp"
#include "gradeig/models/pk.hpp"
#include "gradeig/sampler.hpp"

using namespace gradeig;

namespace {

struct Moments {
  std::vector<double> mean, var;
};

Moments moments(const std::vector<std::vector<double>>& xs) {
  const std::size_t d = xs.front().size();
  Moments m{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (const auto& x : xs) {
    for (std::size_t k = 0; k < d; ++k) m.mean[k] += x[k] / static_cast<double>(xs.size());
  }
  for (const auto& x : xs) {
    for (std::size_t k = 0; k < d; ++k) m.var[k] += (x[k] - m.mean[k]) * (x[k] - m.mean[k]) / (xs.size() - 1.0);
  }
  return m;
}

double gauss2(std::span<const double> x) { return -0.5 * (x[0] * x[0] + x[1] * x[1] / 4.0); }

}  // namespace

TEST_CASE("slice: univariate updates target a standard normal") {
  Rng rng = RngStream(1).engine();
  auto lf = [](double x) { return -0.5 * x * x; };
  double x = 0.0, s1 = 0.0, s2 = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const auto r = slice_update_1d(lf, x, lf(x), 1.0, 32, rng);
    CHECK(r.log_density == lf(r.x));
    x = r.x;
    s1 += x;
    s2 += x * x;
  }
  CHECK(std::abs(s1 / n) < 0.05);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("slice: stepping out is capped and shrinkage handles narrow widths") {
  Rng rng = RngStream(2).engine();
  auto lf = [](double x) { return -0.5 * x * x; };
  // Tiny width with at most 2 expansions: the interval stays inside a few widths of x0.
  for (int i = 0; i < 200; ++i) {
    const auto r = slice_update_1d(lf, 0.0, 0.0, 1e-3, 2, rng);
    CHECK(std::abs(r.x) <= 3e-3);
  }
  CHECK_THROWS_AS(slice_update_1d(lf, 0.0, -std::numeric_limits<double>::infinity(), 1.0, 4, rng), ChainError);
}

TEST_CASE("slice chain: 2-D Gaussian moments") {
  Rng rng = RngStream(3).engine();
  SamplerConfig cfg;
  cfg.kind = SamplerKind::slice;
  cfg.n_samples = 20000;
  const std::vector<double> init{0.0, 0.0}, scales{1.0, 2.0};
  const Chain c = run_chain(gauss2, init, cfg, scales, rng);
  REQUIRE(c.draws.size() == 20000);
  const auto m = moments(c.draws);
  CHECK(std::abs(m.mean[0]) < 0.05);
  CHECK(std::abs(m.mean[1]) < 0.1);
  CHECK(m.var[0] == doctest::Approx(1.0).epsilon(0.06));
  CHECK(m.var[1] == doctest::Approx(4.0).epsilon(0.06));
  CHECK(c.n_target_evals > 20000u);
}

TEST_CASE("adaptive MH: proposal covariance before and after adaptation") {
  Rng rng = RngStream(4).engine();
  const std::vector<double> init{0.0, 0.0};
  AdaptiveMh mh(init, gauss2(init), 20);
  auto p0 = mh.proposal_covariance();
  CHECK(p0 == std::vector<double>{0.01, 0.0, 0.0, 0.01});
  std::vector<std::vector<double>> visited{init};
  while (!mh.adapted()) {
    mh.step(gauss2, rng);
    visited.push_back(mh.state());
  }
  CHECK(mh.accepted() == 20u);
  // Streaming covariance equals the two-pass estimate over visited states.
  const auto cov = mh.covariance();
  const auto m = moments(visited);
  double c01 = 0.0;
  for (const auto& v : visited) c01 += (v[0] - m.mean[0]) * (v[1] - m.mean[1]) / (visited.size() - 1.0);
  CHECK(cov[0] == doctest::Approx(m.var[0]).epsilon(1e-10));
  CHECK(cov[3] == doctest::Approx(m.var[1]).epsilon(1e-10));
  CHECK(cov[1] == doctest::Approx(c01).epsilon(1e-9).scale(1e-6));
  const auto p = mh.proposal_covariance();
  CHECK(p[0] == doctest::Approx(2.38 * 2.38 / 2.0 * cov[0] + 1e-6).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(2.38 * 2.38 / 2.0 * cov[1]).epsilon(1e-12));
}

TEST_CASE("adaptive MH chain: 2-D Gaussian moments") {
  Rng rng = RngStream(5).engine();
  SamplerConfig cfg;
  cfg.kind = SamplerKind::adaptive_mh;
  cfg.n_samples = 40000;
  cfg.thinning = 2;
  const std::vector<double> init{0.0, 0.0};
  const Chain c = run_chain(gauss2, init, cfg, {}, rng);
  const auto m = moments(c.draws);
  CHECK(std::abs(m.mean[0]) < 0.1);
  CHECK(std::abs(m.mean[1]) < 0.2);
  CHECK(m.var[0] == doctest::Approx(1.0).epsilon(0.1));
  CHECK(m.var[1] == doctest::Approx(4.0).epsilon(0.1));
  CHECK(c.accept_rate > 0.1);
  CHECK(c.accept_rate < 0.9);
}

TEST_CASE("chains are deterministic and reject bad starts") {
  SamplerConfig cfg;
  cfg.n_samples = 50;
  const std::vector<double> init{0.3, -0.2}, scales{1.0, 1.0};
  Rng a = RngStream(9).engine(), b = RngStream(9).engine();
  CHECK(run_chain(gauss2, init, cfg, scales, a).draws == run_chain(gauss2, init, cfg, scales, b).draws);
  auto bad = [](std::span<const double>) { return -std::numeric_limits<double>::infinity(); };
  CHECK_THROWS_AS(run_chain(bad, init, cfg, scales, a), ChainError);
  cfg.thinning = 0;
  CHECK_THROWS(run_chain(gauss2, init, cfg, scales, a));
  CHECK_THROWS(parse_sampler_kind("gibbs"));
  CHECK(parse_sampler_kind("adaptive_mh") == SamplerKind::adaptive_mh);
}

TEST_CASE("posterior sampling: slice chain agrees with the exact linear posterior") {
  const models::LinearModel m(2, 0.1);
  const std::vector<double> l{0.5, -0.7};
  Rng rng = RngStream(11).engine();
  const auto theta = m.sample_prior_values(rng);
  const auto y = m.observe(m.forward(theta, l), m.sample_noise(rng), l);
  SamplerConfig cfg;
  cfg.n_samples = 30000;
  const Chain c = sample_posterior(m, y, l, theta, cfg, rng);
  CHECK(c.forward_evals == c.n_target_evals);
  SamplerConfig ex;
  ex.kind = SamplerKind::exact;
  ex.n_samples = 30000;
  const Chain e = sample_posterior(m, y, l, theta, ex, rng);
  const auto mc = moments(c.draws), me = moments(e.draws);
  for (int k = 0; k < 3; ++k) {
    CHECK(mc.mean[k] == doctest::Approx(me.mean[k]).epsilon(0.05).scale(1.0));
    CHECK(mc.var[k] == doctest::Approx(me.var[k]).epsilon(0.1));
  }
}

TEST_CASE("posterior sampling: PK chain works in log space and stays positive") {
  const models::PkModel m(models::PkNoise{});
  std::vector<double> l(10);
  for (int i = 0; i < 10; ++i) l[i] = 1.0 + 2.0 * i;
  Rng rng = RngStream(13).engine();
  const auto theta = m.sample_prior_values(rng);
  const auto y = m.observe(m.forward(theta, l), m.sample_noise(rng), l);
  for (auto kind : {SamplerKind::slice, SamplerKind::adaptive_mh}) {
    SamplerConfig cfg;
    cfg.kind = kind;
    cfg.n_samples = 200;
    const Chain c = sample_posterior(m, y, l, theta, cfg, rng);
    for (const auto& d : c.draws) {
      for (double v : d) CHECK(v > 0.0);
    }
  }
  SamplerConfig ex;
  ex.kind = SamplerKind::exact;
  CHECK_THROWS(sample_posterior(m, y, l, theta, ex, rng));
}
