#include "gradeig/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "gradeig/eig_est.hpp"
#include "gradeig/grad_est.hpp"
#include "gradeig/models/linear.hpp"
#include "gradeig/models/pk.hpp"
#include "gradeig/models/stat5.hpp"
#include "gradeig/models/toy.hpp"
#include "gradeig/simd/kernels.hpp"

namespace gradeig {

std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> lambda, double h) {
  std::vector<double> x(lambda.begin(), lambda.end());
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double x0 = x[k];
    const double hk = h * std::max(1.0, std::abs(x0));
    x[k] = x0 + hk;
    const double fp = f(x);
    x[k] = x0 - hk;
    const double fm = f(x);
    x[k] = x0;
    g[k] = (fp - fm) / (2.0 * hk);
  }
  return g;
}

double max_rel_error(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num = std::max(num, std::abs(a[k] - b[k]));
    den = std::max(den, std::abs(b[k]));
  }
  if (den == 0.0) return num;
  return num / den;
}

namespace {

std::vector<std::unique_ptr<Model>> all_models() {
  std::vector<std::unique_ptr<Model>> ms;
  ms.push_back(std::make_unique<models::LinearModel>(3, 1.0));
  ms.push_back(std::make_unique<models::ToyModel>(0.1));
  ms.push_back(std::make_unique<models::PkModel>(models::PkNoise{}));
  ms.push_back(std::make_unique<models::Stat5Model>(models::Stat5Config{}, models::synthetic_epo_pulse()));
  return ms;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

std::vector<CheckResult> run_selftest(std::uint64_t seed) {
  std::vector<CheckResult> out;
  const RngStream root = RngStream(seed).child("selftest");
  const auto ms = all_models();

  {
    Rng rng = root.child("ad").engine();
    const Box box = Box::uniform(3, -1.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
      const auto lambda = box.sample_uniform(rng);
      worst = std::max(worst, grad_check(
                                  [](const auto& l) {
                                    using T = typename std::decay_t<decltype(l)>::value_type;
                                    return models::linear_eig<T>(std::span<const T>(l), 0.5);
                                  },
                                  lambda, 1e-6));
    }
    out.push_back({"dual gradient of closed-form EIG matches finite differences", worst < 1e-6,
                   "max rel err " + fmt(worst)});
  }

  {
    double worst_ad = 0.0, worst_fd = 0.0;
    for (std::size_t mi = 0; mi < ms.size(); ++mi) {
      const Model& m = *ms[mi];
      Rng rng = root.child("identity").child(mi).engine();
      const auto lambda = m.design_box().sample_uniform(rng);
      const PriorBatch batch = draw_batch(m, 16, root.child("identity-batch").child(mi));
      SimBudget b;
      const auto beeg = beeg_ap_gradient(m, lambda, batch, b);
      const auto ad = gradient_of(srnmc_objective(m, lift_design(lambda), batch, b));
      const auto fd = central_difference(
          [&](std::span<const double> l) { return srnmc_value(m, l, batch, b).value; }, lambda, 1e-6);
      worst_ad = std::max(worst_ad, max_rel_error(beeg.gradient, ad));
      worst_fd = std::max(worst_fd, max_rel_error(beeg.gradient, fd));
    }
    out.push_back({"BEEG-AP equals autodiff gradient of srNMC", worst_ad < 1e-10, "max rel err " + fmt(worst_ad)});
    out.push_back({"BEEG-AP equals finite differences of srNMC", worst_fd < 1e-4, "max rel err " + fmt(worst_fd)});
  }

  {
    std::size_t violations = 0, trials = 0;
    for (std::size_t mi = 0; mi < ms.size(); ++mi) {
      const Model& m = *ms[mi];
      for (std::size_t t = 0; t < 25; ++t) {
        const RngStream s = root.child("cap").child(mi).child(t);
        Rng rng = s.child("design").engine();
        const auto lambda = m.design_box().sample_uniform(rng);
        const std::size_t M = 2 + t % 7;
        SimBudget b;
        if (srnmc_value(m, lambda, M, s, b).value > std::log(static_cast<double>(M))) ++violations;
        if (pce_value(m, lambda, 3, M - 2, s.child("pce"), b).value > std::log(static_cast<double>(M - 1))) ++violations;
        ++trials;
      }
    }
    out.push_back({"srNMC <= log M and PCE <= log(N+1)", violations == 0,
                   std::to_string(violations) + " violations in " + std::to_string(2 * trials) + " estimates"});
  }

  {
    const models::LinearModel lin(1, 1.0);
    SimBudget b;
    const double one = srnmc_value(lin, std::vector<double>{0.3}, 1, root.child("m1"), b).value;
    out.push_back({"srNMC with M = 1 is zero", one == 0.0, "value " + fmt(one)});
  }

  {
    const auto& scalar = simd::kernels_for(simd::Isa::scalar);
    const auto& active = simd::kernels();
    Rng rng = root.child("simd").engine();
    std::vector<double> x(1001);
    for (double& v : x) v = 40.0 * (uniform01(rng) - 0.5);
    const double m = scalar.max_value(x.data(), x.size());
    const double a = scalar.sum_exp_shifted(x.data(), x.size(), m);
    const double c = active.sum_exp_shifted(x.data(), x.size(), m);
    const double rel = std::abs(a - c) / a;
    out.push_back({std::string("SIMD kernels (") + std::string(simd::isa_name(active.isa)) + ") agree with scalar",
                   rel < 1e-13 && m == active.max_value(x.data(), x.size()), "sum_exp rel diff " + fmt(rel)});
  }
  return out;
}

}  // namespace gradeig
