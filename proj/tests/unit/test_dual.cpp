#include <cmath>
#include <vector>

#include "doctest.h"
#include "gradeig/dual.hpp"

using namespace gradeig;

TEST_CASE("dual: product and quotient rules") {
  const Dual x = Dual::variable(3.0, 2, 0);
  const Dual y = Dual::variable(2.0, 2, 1);
  const Dual p = x * y;
  CHECK(p.value() == 6.0);
  CHECK(p.d(0) == 2.0);
  CHECK(p.d(1) == 3.0);
  const Dual q = x / y;
  CHECK(q.value() == doctest::Approx(1.5));
  CHECK(q.d(0) == doctest::Approx(0.5));
  CHECK(q.d(1) == doctest::Approx(-0.75));
  const Dual r = 1.0 / y;
  CHECK(r.d(1) == doctest::Approx(-0.25));
  const Dual s = 2.0 - x;
  CHECK(s.value() == -1.0);
  CHECK(s.d(0) == -1.0);
}

TEST_CASE("dual: elementary functions") {
  const Dual x = Dual::variable(0.7, 1, 0);
  CHECK(exp(x).d(0) == doctest::Approx(std::exp(0.7)));
  CHECK(log(x).d(0) == doctest::Approx(1.0 / 0.7));
  CHECK(sqrt(x).d(0) == doctest::Approx(0.5 / std::sqrt(0.7)));
  CHECK(tanh(x).d(0) == doctest::Approx(1.0 - std::tanh(0.7) * std::tanh(0.7)));
  CHECK(pow(x, 3.0).d(0) == doctest::Approx(3.0 * 0.49));
  const Dual two = Dual(2.0, 1);
  CHECK(pow(two, x).d(0) == doctest::Approx(std::pow(2.0, 0.7) * std::log(2.0)));
}

TEST_CASE("dual: abs has zero derivative at zero") {
  CHECK(abs(Dual::variable(0.0, 1, 0)).d(0) == 0.0);
  CHECK(abs(Dual::variable(-2.0, 1, 0)).d(0) == -1.0);
  CHECK(abs(Dual::variable(2.0, 1, 0)).d(0) == 1.0);
}

TEST_CASE("dual: domain errors") {
  CHECK_THROWS_AS(log(Dual(0.0, 1)), DualError);
  CHECK_THROWS_AS(log(Dual(-1.0, 1)), DualError);
  CHECK_THROWS_AS(sqrt(Dual(-1.0, 1)), DualError);
  CHECK_THROWS_AS(Dual(1.0, 2) / Dual(0.0, 2), DualError);
}

TEST_CASE("dual: tangent length mismatch and capacity") {
  CHECK_THROWS_AS(Dual(1.0, 2) + Dual(1.0, 3), DualError);
  CHECK_THROWS_AS(Dual(1.0, kMaxTangents + 1), DualError);
  CHECK_NOTHROW(Dual(1.0, kMaxTangents));
  CHECK_THROWS_AS(Dual::variable(1.0, 2, 2), DualError);
}

TEST_CASE("dual: comparisons look at primal values") {
  Dual a = Dual::variable(1.0, 1, 0);
  Dual b(1.0, 1);
  CHECK_FALSE(a < b);
  CHECK(a <= b);
  CHECK(a < 2.0);
  CHECK(0.5 < a);
}

TEST_CASE("dual: grad_check on a composite function") {
  auto f = [](const auto& x) {
    using std::exp;
    using std::log;
    using std::sin;
    auto s = x[0] * x[0] + exp(x[1] * x[2]);
    return log(s) * x[2] + x[0] / (1.0 + x[1] * x[1]);
  };
  const std::vector<double> at{0.3, -0.8, 1.2};
  CHECK(grad_check(f, at, 1e-6) < 1e-7);
}

TEST_CASE("dual: lift_design seeds basis tangents") {
  const std::vector<double> l{1.0, 2.0, 3.0};
  const auto d = lift_design(l);
  REQUIRE(d.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(d[i].value() == l[i]);
    for (std::size_t k = 0; k < 3; ++k) CHECK(d[i].d(k) == (i == k ? 1.0 : 0.0));
  }
  CHECK(values_of(d) == l);
}
