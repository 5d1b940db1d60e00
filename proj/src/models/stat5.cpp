#include "gradeig/models/stat5.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gradeig/ode.hpp"

namespace gradeig::models {

PiecewiseLinear::PiecewiseLinear(std::vector<double> t, std::vector<double> v) : t_(std::move(t)), v_(std::move(v)) {
  if (t_.size() != v_.size()) throw std::invalid_argument("PiecewiseLinear: length mismatch");
  if (t_.size() < 2) throw std::invalid_argument("PiecewiseLinear: need at least two points");
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (!std::isfinite(t_[i]) || !std::isfinite(v_[i])) throw std::invalid_argument("PiecewiseLinear: nonfinite entry");
    if (i > 0 && !(t_[i] > t_[i - 1])) throw std::invalid_argument("PiecewiseLinear: times must be strictly increasing");
  }
}

double PiecewiseLinear::operator()(double t) const {
  if (t <= t_.front()) return v_.front();
  if (t >= t_.back()) return v_.back();
  std::size_t lo = 0, hi = t_.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (t_[mid] <= t ? lo : hi) = mid;
  }
  const double w = (t - t_[lo]) / (t_[hi] - t_[lo]);
  return v_[lo] + w * (v_[hi] - v_[lo]);
}

PiecewiseLinear load_epo_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open EpoR_A CSV: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,value") throw std::runtime_error(path.string() + ":1: expected header 't,value'");
  std::vector<double> t, v;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected two columns");
    try {
      std::size_t used = 0;
      const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      t.push_back(std::stod(a, &used));
      if (used != a.size()) throw std::invalid_argument("trailing");
      v.push_back(std::stod(b, &used));
      if (used != b.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": malformed number");
    }
    if (t.size() > 1 && !(t.back() > t[t.size() - 2])) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": t must be strictly increasing");
    }
  }
  if (t.size() < 2) throw std::runtime_error(path.string() + ": need at least two rows");
  return PiecewiseLinear(std::move(t), std::move(v));
}

PiecewiseLinear synthetic_epo_pulse() {
  return PiecewiseLinear({0.0, 10.0, 20.0, 30.0, 45.0, 60.0}, {0.0, 1.0, 0.5, 0.25, 0.08, 0.0});
}

Stat5Model::Stat5Model(Stat5Config cfg, PiecewiseLinear epo) : cfg_(std::move(cfg)), epo_(std::move(epo)) {
  if (!(cfg_.sigma > 0.0)) throw std::invalid_argument("Stat5Model: sigma must be positive");
  if (cfg_.n_times == 0 || cfg_.n_times > kMaxTangents) throw std::invalid_argument("Stat5Model: unsupported n_times");
  if (!(cfg_.step > 0.0) || !(cfg_.t_end > 0.0)) throw std::invalid_argument("Stat5Model: step and t_end must be positive");
  const double steps = cfg_.t_end / cfg_.step;
  if (std::abs(steps - std::round(steps)) > 1e-9) throw std::invalid_argument("Stat5Model: t_end must be a multiple of step");
  steps_ = static_cast<std::size_t>(std::round(steps));
  if (cfg_.prior_lo.size() != 3 || cfg_.prior_hi.size() != 3) throw std::invalid_argument("Stat5Model: prior box must be 3-D");
  for (std::size_t k = 0; k < 3; ++k) {
    if (!(cfg_.prior_lo[k] < cfg_.prior_hi[k])) throw std::invalid_argument("Stat5Model: empty prior box");
  }
  if (!(cfg_.prior_lo[2] > 0.0)) throw std::invalid_argument("Stat5Model: delay must be positive");
}

std::vector<double> Stat5Model::sample_prior_values(Rng& rng) const {
  std::vector<double> theta(3);
  for (std::size_t k = 0; k < 3; ++k) theta[k] = cfg_.prior_lo[k] + (cfg_.prior_hi[k] - cfg_.prior_lo[k]) * uniform01(rng);
  return theta;
}

double Stat5Model::log_prior(std::span<const double> theta) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    if (!(theta[k] >= cfg_.prior_lo[k] && theta[k] <= cfg_.prior_hi[k])) return -std::numeric_limits<double>::infinity();
    acc -= std::log(cfg_.prior_hi[k] - cfg_.prior_lo[k]);
  }
  return acc;
}

std::vector<CoordinateTransform> Stat5Model::sampler_transforms() const {
  std::vector<CoordinateTransform> out;
  for (std::size_t k = 0; k < 3; ++k) {
    out.push_back({CoordinateTransform::Kind::logit, cfg_.prior_lo[k], cfg_.prior_hi[k]});
  }
  return out;
}

// Standard deviation of logit(U) for U ~ Unif(0,1) is pi / sqrt(3).
std::vector<double> Stat5Model::sampler_scales() const { return std::vector<double>(3, 1.8137993642342178); }

std::optional<double> Stat5Model::prior_entropy() const {
  double h = 0.0;
  for (std::size_t k = 0; k < 3; ++k) h += std::log(cfg_.prior_hi[k] - cfg_.prior_lo[k]);
  return h;
}

std::vector<double> Stat5Model::solve_nodes(std::span<const double> theta) const {
  const double k1 = theta[0], k2 = theta[1], tau = theta[2];
  if (!(tau > 0.0)) {
    throw SimulationError("stat5: nonpositive delay at theta = (" + std::to_string(k1) + ", " + std::to_string(k2) +
                          ", " + std::to_string(tau) + ")");
  }
  const double rate = static_cast<double>(kChainLength) / tau;
  // State: x1..x4, then delay chain q1..q_{N-1}, out.
  auto rhs = [&](double t, const std::array<double, kStates>& x, std::array<double, kStates>& dx) {
    const double epo = epo_(t);
    const double delayed = x[kStates - 1];
    dx[0] = -k1 * x[0] * epo + k2 * delayed;
    dx[1] = -x[1] * x[1] + k1 * x[0] * epo;
    dx[2] = -k2 * x[2] + x[1] * x[1];
    dx[3] = -k2 * delayed + k2 * x[2];
    dx[4] = rate * (x[2] - x[4]);
    for (std::size_t i = 5; i < kStates; ++i) dx[i] = rate * (x[i - 1] - x[i]);
  };
  std::array<double, kStates> x{};
  x[0] = cfg_.x1_0;
  std::vector<double> nodes(2 * (steps_ + 1));
  bool finite = true;
  integrate_rk38(rhs, x, 0.0, cfg_.step, steps_, [&](std::size_t i, double, const std::array<double, kStates>& s) {
    nodes[2 * i] = cfg_.s1 * (s[1] + s[2]);
    nodes[2 * i + 1] = cfg_.s2 * (s[0] + s[1] + s[2]);
    finite = finite && std::isfinite(nodes[2 * i]) && std::isfinite(nodes[2 * i + 1]);
  });
  if (!finite) {
    throw SimulationError("stat5: ODE state became nonfinite at theta = (" + std::to_string(k1) + ", " +
                          std::to_string(k2) + ", " + std::to_string(tau) + ")");
  }
  return nodes;
}

}  // namespace gradeig::models
