#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gradeig/rng.hpp"

namespace gradeig {

/// Per-dimension box constraints on a design.
class Box {
 public:
  Box() = default;
  Box(std::vector<double> lo, std::vector<double> hi);
  static Box uniform(std::size_t dim, double lo, double hi);

  std::size_t dim() const noexcept { return lo_.size(); }
  const std::vector<double>& lo() const noexcept { return lo_; }
  const std::vector<double>& hi() const noexcept { return hi_; }

  bool contains(std::span<const double> x) const;
  /// Componentwise projection onto the box.
  std::vector<double> clip(std::span<const double> x) const;
  std::vector<double> sample_uniform(Rng& rng) const;

 private:
  std::vector<double> lo_, hi_;
};

/// A design vector that always lies inside its box.
class Design {
 public:
  Design(std::vector<double> values, Box box);

  const std::vector<double>& values() const noexcept { return values_; }
  const Box& box() const noexcept { return box_; }
  std::size_t dim() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }

  /// Returns the projection of `values` onto this design's box.
  Design moved_to(std::span<const double> values) const;

 private:
  std::vector<double> values_;
  Box box_;
};

}  // namespace gradeig
