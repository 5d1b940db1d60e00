#pragma once

// Quick invariant suite behind `gradeig selftest`.

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace gradeig {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> run_selftest(std::uint64_t seed);

/// Central differences with step h * max(1, |lambda_k|).
std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> lambda, double h);

/// max_k |a_k - b_k| / max_k |b_k| (b is the reference).
double max_rel_error(std::span<const double> a, std::span<const double> b);

}  // namespace gradeig
