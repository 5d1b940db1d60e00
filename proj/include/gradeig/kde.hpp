#pragma once

// Gaussian product-kernel density estimate with per-dimension Silverman
// bandwidths, and its resubstitution entropy
//   H = -(1/n) sum_i log p(x_i)
// (each point is included in its own density; the estimate is biased low
// for small n but consistent).

#include <cstddef>
#include <span>
#include <vector>

namespace gradeig {

class GaussianKde {
 public:
  /// `samples[i]` is the i-th point; all points share one dimension.
  explicit GaussianKde(const std::vector<std::vector<double>>& samples);
  GaussianKde(const std::vector<std::vector<double>>& samples, std::vector<double> bandwidths);

  /// h_d = sd_d * (4 / ((D + 2) n))^(1 / (D + 4)), floored at kMinBandwidth.
  static std::vector<double> silverman_bandwidths(const std::vector<std::vector<double>>& samples,
                                                  std::size_t* floored = nullptr);
  static constexpr double kMinBandwidth = 1e-8;

  double log_density(std::span<const double> x) const;
  double resubstitution_entropy() const;

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<double>& bandwidths() const noexcept { return h_; }
  std::size_t floored_dims() const noexcept { return floored_; }

 private:
  void init(const std::vector<std::vector<double>>& samples);

  std::size_t n_ = 0, dim_ = 0;
  std::vector<double> cols_;  // dimension-major
  std::vector<double> h_, inv_h_;
  double log_norm_ = 0.0;
  std::size_t floored_ = 0;
};

}  // namespace gradeig
