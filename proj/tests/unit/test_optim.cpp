#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gradeig/models/linear.hpp"
#include "gradeig/models/toy.hpp"
#include "gradeig/optim.hpp"

using namespace gradeig;
using namespace gradeig::models;

namespace {

GradientSource oracle_source(double sigma2) {
  return [sigma2](std::span<const double> l, std::size_t, SimBudget& b) {
    b.charge_fresh(1);
    GradEstimate g;
    g.gradient = linear_eig_oracle(l, sigma2).gradient;
    return g;
  };
}

GradientSource constant_source(std::vector<double> g) {
  return [g](std::span<const double>, std::size_t, SimBudget&) { return GradEstimate{g, 0, 0, 0}; };
}

OptimConfig sgd(double lr, std::size_t steps) {
  OptimConfig c;
  c.step_rule = StepRuleKind::sgd;
  c.learning_rate = lr;
  c.max_steps = steps;
  c.max_forward_evals = 1000000;
  return c;
}

}  // namespace

TEST_CASE("optimize: oracle ascent on the 1-D linear model increases EIG to the bound") {
  const Design start({0.5}, Box::uniform(1, -1.0, 1.0));
  const auto traj = optimize(start, sgd(1e-2, 2000), oracle_source(1.0));
  double prev = -1.0;
  for (const auto& r : traj.records) {
    const double u = linear_eig<double>(r.lambda, 1.0);
    CHECK(u >= prev);
    prev = u;
  }
  CHECK(traj.final_design()[0] == 1.0);
}

TEST_CASE("optimize: the symmetric point is a fixed point") {
  const Design start({0.0}, Box::uniform(1, -1.0, 1.0));
  const auto traj = optimize(start, sgd(1e-2, 50), oracle_source(1.0));
  for (const auto& r : traj.records) CHECK(r.lambda[0] == 0.0);
}

TEST_CASE("step rules: sgd, adam and clipping") {
  const Design start({0.0, 0.0}, Box::uniform(2, -1.0, 1.0));
  auto t = optimize(start, sgd(0.1, 3), constant_source({0.5, -0.25}));
  REQUIRE(t.records.size() == 4);
  CHECK(t.records[1].lambda[0] == doctest::Approx(0.05));
  CHECK(t.records[3].lambda[1] == doctest::Approx(-0.075));
  CHECK(t.records[1].grad_norm == doctest::Approx(std::sqrt(0.3125)));

  StepRule adam(StepRuleKind::adam, 0.01, 2);
  const auto d = adam.step(std::vector<double>{3.0, -1e-3});
  CHECK(d[0] == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(d[1] == doctest::Approx(-0.01).epsilon(1e-4));

  auto clipped = optimize(start, sgd(10.0, 1), constant_source({1.0, -3.0}));
  CHECK(clipped.final_design() == std::vector<double>{1.0, -1.0});
}

TEST_CASE("optimize: budget stop, feasibility and reproducibility") {
  const ToyModel toy(0.1);
  OptimConfig c;
  c.estimator.kind = EstimatorKind::beeg_ap;
  c.estimator.M = 100;
  c.max_forward_evals = 1050;
  c.seed = 7;
  const Design start({0.5, 0.5}, toy.design_box());
  const auto a = optimize(toy, start, c);
  CHECK(a.records.back().forward_evals == 1100u);
  std::uint64_t prev = 0;
  for (const auto& r : a.records) {
    CHECK(r.forward_evals >= prev);
    prev = r.forward_evals;
    CHECK(toy.design_box().contains(r.lambda));
    CHECK(r.wall_ms == 0.0);
  }
  const auto b = optimize(toy, start, c);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].lambda == b.records[i].lambda);
    CHECK(a.records[i].grad_norm == b.records[i].grad_norm);
  }
  c.seed = 8;
  const auto other = optimize(toy, start, c);
  CHECK(other.final_design() != a.final_design());
}

TEST_CASE("optimize: all estimators and fixed atoms run") {
  const ToyModel toy(0.1);
  const Design start({0.2, 0.7}, toy.design_box());
  for (auto kind : {EstimatorKind::ueeg_mcmc, EstimatorKind::beeg_ap, EstimatorKind::pce}) {
    OptimConfig c;
    c.estimator.kind = kind;
    c.estimator.M = 10;
    c.estimator.N = 10;
    c.estimator.sampler.n_samples = 5;
    c.estimator.sampler.thinning = 2;
    c.max_forward_evals = 2000;
    const auto t = optimize(toy, start, c);
    CHECK(t.records.size() > 2);
    CHECK(t.records.back().forward_evals >= 2000u);
  }
  OptimConfig f;
  f.estimator.fixed_atoms = true;
  f.max_steps = 5;
  CHECK(optimize(toy, start, f).records.size() == 6);
}

TEST_CASE("optimize: estimator failures are skipped, five in a row abort") {
  const Design start({0.0}, Box::uniform(1, -1.0, 1.0));
  GradientSource flaky = [](std::span<const double>, std::size_t step, SimBudget&) -> GradEstimate {
    if (step % 2 == 0) throw std::runtime_error("boom");
    return {{1.0}, 0, 0, 0};
  };
  const auto t = optimize(start, sgd(0.01, 10), flaky);
  CHECK(t.failures.size() == 5);
  CHECK(t.records.size() == 6);
  GradientSource broken = [](std::span<const double>, std::size_t, SimBudget&) -> GradEstimate {
    throw std::runtime_error("always");
  };
  CHECK_THROWS_AS(optimize(start, sgd(0.01, 10), broken), OptimError);
}

TEST_CASE("optim config validation") {
  OptimConfig c;
  c.learning_rate = 0.0;
  CHECK_THROWS(c.validate());
  c = OptimConfig{};
  c.max_forward_evals = 0;
  CHECK_THROWS(c.validate());
  CHECK(parse_estimator_kind("beeg_ap") == EstimatorKind::beeg_ap);
  CHECK_THROWS(parse_step_rule("rmsprop"));
}
