#include "gradeig/dual.hpp"

namespace gradeig {

std::vector<Dual> lift_design(std::span<const double> lambda) {
  std::vector<Dual> out;
  out.reserve(lambda.size());
  for (std::size_t k = 0; k < lambda.size(); ++k) out.push_back(Dual::variable(lambda[k], lambda.size(), k));
  return out;
}

std::vector<double> values_of(std::span<const Dual> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const Dual& x : xs) out.push_back(x.value());
  return out;
}

}  // namespace gradeig
