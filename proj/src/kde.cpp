#include "gradeig/kde.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

#include "gradeig/simd/kernels.hpp"

namespace gradeig {

namespace {

void check_samples(const std::vector<std::vector<double>>& samples) {
  if (samples.size() < 2) throw std::invalid_argument("kde: need at least 2 samples");
  const std::size_t d = samples.front().size();
  if (d == 0) throw std::invalid_argument("kde: zero-dimensional samples");
  for (const auto& s : samples) {
    if (s.size() != d) throw std::invalid_argument("kde: samples have differing dimensions");
    for (double v : s) {
      if (!std::isfinite(v)) throw std::invalid_argument("kde: nonfinite sample");
    }
  }
}

}  // namespace

std::vector<double> GaussianKde::silverman_bandwidths(const std::vector<std::vector<double>>& samples,
                                                      std::size_t* floored) {
  check_samples(samples);
  const std::size_t n = samples.size();
  const std::size_t D = samples.front().size();
  const double factor =
      std::pow(4.0 / ((static_cast<double>(D) + 2.0) * static_cast<double>(n)), 1.0 / (static_cast<double>(D) + 4.0));
  std::vector<double> h(D);
  std::size_t nfloor = 0;
  for (std::size_t d = 0; d < D; ++d) {
    double mean = 0.0;
    for (const auto& s : samples) mean += s[d];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& s : samples) ss += (s[d] - mean) * (s[d] - mean);
    h[d] = std::sqrt(ss / static_cast<double>(n - 1)) * factor;
    if (!(h[d] >= kMinBandwidth)) {
      h[d] = kMinBandwidth;
      ++nfloor;
    }
  }
  if (floored) *floored = nfloor;
  return h;
}

GaussianKde::GaussianKde(const std::vector<std::vector<double>>& samples) {
  h_ = silverman_bandwidths(samples, &floored_);
  if (floored_ > 0) {
    std::clog << "warning: kde: " << floored_ << " degenerate dimension(s); bandwidth floored at " << kMinBandwidth
              << "\n";
  }
  init(samples);
}

GaussianKde::GaussianKde(const std::vector<std::vector<double>>& samples, std::vector<double> bandwidths)
    : h_(std::move(bandwidths)) {
  check_samples(samples);
  if (h_.size() != samples.front().size()) throw std::invalid_argument("kde: bandwidth dimension mismatch");
  for (double h : h_) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("kde: bandwidths must be positive");
  }
  init(samples);
}

void GaussianKde::init(const std::vector<std::vector<double>>& samples) {
  n_ = samples.size();
  dim_ = samples.front().size();
  cols_.resize(n_ * dim_);
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t d = 0; d < dim_; ++d) cols_[d * n_ + j] = samples[j][d];
  }
  inv_h_.resize(dim_);
  double log_h = 0.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    inv_h_[d] = 1.0 / h_[d];
    log_h += std::log(h_[d]);
  }
  log_norm_ = -std::log(static_cast<double>(n_)) - log_h -
              0.5 * static_cast<double>(dim_) * std::log(2.0 * std::numbers::pi);
}

double GaussianKde::log_density(std::span<const double> x) const {
  if (x.size() != dim_) throw std::invalid_argument("kde: query dimension mismatch");
  const auto& k = simd::kernels();
  std::vector<double> r(n_);
  k.scaled_sq_dist(cols_.data(), n_, dim_, x.data(), inv_h_.data(), r.data());
  for (double& v : r) v *= -0.5;
  return log_norm_ + simd::log_sum_exp(r.data(), n_);
}

double GaussianKde::resubstitution_entropy() const {
  std::vector<double> x(dim_);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t d = 0; d < dim_; ++d) x[d] = cols_[d * n_ + i];
    sum += log_density(x);
  }
  return -sum / static_cast<double>(n_);
}

}  // namespace gradeig
