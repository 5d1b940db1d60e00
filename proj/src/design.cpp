#include "gradeig/design.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gradeig {

Box::Box(std::vector<double> lo, std::vector<double> hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw std::invalid_argument("Box: lo/hi length mismatch");
  for (std::size_t k = 0; k < lo_.size(); ++k) {
    if (!(lo_[k] <= hi_[k]) || !std::isfinite(lo_[k]) || !std::isfinite(hi_[k])) {
      throw std::invalid_argument("Box: invalid bounds in dimension " + std::to_string(k));
    }
  }
}

Box Box::uniform(std::size_t dim, double lo, double hi) {
  return Box(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] >= lo_[k] && x[k] <= hi_[k])) return false;
  }
  return true;
}

std::vector<double> Box::clip(std::span<const double> x) const {
  if (x.size() != dim()) throw std::invalid_argument("Box::clip: dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = std::clamp(x[k], lo_[k], hi_[k]);
  return out;
}

std::vector<double> Box::sample_uniform(Rng& rng) const {
  std::vector<double> out(dim());
  for (std::size_t k = 0; k < dim(); ++k) out[k] = lo_[k] + (hi_[k] - lo_[k]) * uniform01(rng);
  return out;
}

Design::Design(std::vector<double> values, Box box) : values_(std::move(values)), box_(std::move(box)) {
  if (!box_.contains(values_)) throw std::invalid_argument("Design: values outside box");
}

Design Design::moved_to(std::span<const double> values) const { return Design(box_.clip(values), box_); }

}  // namespace gradeig
