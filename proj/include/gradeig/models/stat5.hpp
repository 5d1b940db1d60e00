#pragma once

// JAK-STAT5 core module with a linear delay chain standing in for the
// transport delay x3(t - tau). Parameters theta = (k1, k2, tau) with a
// uniform box prior; the design is a set of measurement times in [0, 60] min.
// Each time contributes two observations:
//   y1 = s1 (x2 + x3),   y2 = s2 (x1 + x2 + x3),
// read off the ODE solution by linear interpolation between solver nodes.

#include <filesystem>
#include <string>
#include <vector>

#include "gradeig/model.hpp"
#include "gradeig/models/gaussian.hpp"

namespace gradeig::models {

/// Piecewise-linear input signal with clamped extrapolation.
class PiecewiseLinear {
 public:
  PiecewiseLinear(std::vector<double> t, std::vector<double> v);
  double operator()(double t) const;
  const std::vector<double>& times() const noexcept { return t_; }
  const std::vector<double>& values() const noexcept { return v_; }

 private:
  std::vector<double> t_, v_;
};

/// Reads an EpoR_A trace from CSV with header `t,value`, strictly increasing
/// t and at least two rows.
PiecewiseLinear load_epo_csv(const std::filesystem::path& path);

/// Synthetic receptor-activity pulse used when no measured trace is given:
/// linear rise to 1 at t = 10, then a piecewise-linear decay to 0 at t = 60.
/// This is a stand-in, not measured data.
PiecewiseLinear synthetic_epo_pulse();

struct Stat5Config {
  double sigma = 0.01;
  std::size_t n_times = 16;
  double t_end = 60.0;
  double step = 0.125;
  double s1 = 0.33;
  double s2 = 0.26;
  double x1_0 = 3.71;
  std::vector<double> prior_lo{0.5, 0.05, 4.0};
  std::vector<double> prior_hi{3.0, 0.2, 10.0};
};

class Stat5Model : public ModelBase<Stat5Model> {
 public:
  static constexpr std::size_t kChainLength = 8;
  static constexpr std::size_t kStates = 4 + kChainLength;

  Stat5Model(Stat5Config cfg, PiecewiseLinear epo);

  std::string name() const override { return "stat5"; }
  std::size_t theta_dim() const override { return 3; }
  std::size_t design_dim() const override { return cfg_.n_times; }
  std::size_t obs_dim() const override { return 2 * cfg_.n_times; }
  std::size_t noise_dim() const override { return 2 * cfg_.n_times; }
  Box design_box() const override { return Box::uniform(cfg_.n_times, 0.0, cfg_.t_end); }

  const Stat5Config& config() const noexcept { return cfg_; }

  std::vector<double> sample_prior_values(Rng& rng) const override;
  double log_prior(std::span<const double> theta) const override;
  std::vector<CoordinateTransform> sampler_transforms() const override;
  std::vector<double> sampler_scales() const override;
  std::optional<double> prior_entropy() const override;

  /// Observables (y1, y2) at every solver node: 2 * (steps + 1) values, node-major.
  std::vector<double> solve_nodes(std::span<const double> theta) const;

  template <class T>
  std::vector<T> forward_t(std::span<const double> theta, std::span<const T> times) const {
    std::vector<double> nodes;
    try {
      nodes = solve_nodes(theta);
    } catch (const SimulationError& e) {
      std::string where = std::string(e.what()) + " at lambda = (";
      for (std::size_t k = 0; k < times.size(); ++k) where += (k ? ", " : "") + std::to_string(value_of(times[k]));
      throw SimulationError(where + ")");
    }
    const std::size_t last = steps_ - 1;
    std::vector<T> f;
    f.reserve(2 * times.size());
    for (const T& t : times) {
      const double tv = value_of(t);
      if (!(tv >= 0.0 && tv <= cfg_.t_end)) {
        throw SimulationError("stat5: measurement time " + std::to_string(tv) + " outside [0, t_end]");
      }
      std::size_t seg = static_cast<std::size_t>(tv / cfg_.step);
      if (seg > last) seg = last;
      const T w = (t - static_cast<double>(seg) * cfg_.step) * (1.0 / cfg_.step);
      for (std::size_t c = 0; c < 2; ++c) {
        const double a = nodes[2 * seg + c];
        const double b = nodes[2 * (seg + 1) + c];
        f.push_back(a + (b - a) * w);
      }
    }
    return f;
  }

  template <class T>
  std::vector<T> observe_t(std::span<const T> f, std::span<const double> noise, std::span<const T>) const {
    std::vector<T> y;
    y.reserve(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) y.push_back(f[k] + cfg_.sigma * noise[k]);
    return y;
  }

  template <class T>
  T log_likelihood_t(std::span<const T> y, std::span<const T> f, std::span<const T> lambda) const {
    return gaussian_additive_loglik<T>(y, f, cfg_.sigma, lambda.size());
  }

 private:
  Stat5Config cfg_;
  PiecewiseLinear epo_;
  std::size_t steps_;
};

}  // namespace gradeig::models
