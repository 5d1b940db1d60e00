#include "gradeig/eig_est.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gradeig/parallel.hpp"
#include "gradeig/simd/kernels.hpp"

namespace gradeig {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

EigEstimate summarize(std::span<const double> terms, double offset, std::size_t M, std::size_t N,
                      std::uint64_t evals) {
  EigEstimate est;
  est.M = M;
  est.N = N;
  est.forward_evals_used = evals;
  double sum = 0.0;
  for (double t : terms) sum += t;
  const double mean = sum / static_cast<double>(terms.size());
  est.value = offset + mean;
  if (terms.size() > 1) {
    double ss = 0.0;
    for (double t : terms) ss += (t - mean) * (t - mean);
    est.std_error = std::sqrt(ss / static_cast<double>(terms.size() - 1) / static_cast<double>(terms.size()));
  }
  return est;
}

// (row[own] - m) - log(sum_j exp(row[j] - m)) with m = max(row). The own
// entry contributes exactly 1 to the sum when it is the maximum, so the
// result is <= 0 in floating point.
double log_ratio_term(std::span<const double> row, std::size_t own, std::size_t i) {
  const auto& k = simd::kernels();
  const double m = k.max_value(row.data(), row.size());
  if (m == kNegInf) throw EstimatorError("no parameter explains observation " + std::to_string(i));
  const double s = k.sum_exp_shifted(row.data(), row.size(), m);
  return (row[own] - m) - std::log(s);
}

Dual dual_log_ratio_term(std::span<const Dual> row, const Dual& own, std::size_t i) {
  double m = kNegInf;
  for (const Dual& r : row) m = std::max(m, r.value());
  if (m == kNegInf) throw EstimatorError("no parameter explains observation " + std::to_string(i));
  Dual s(0.0, own.dim());
  for (const Dual& r : row) {
    if (r.value() != kNegInf) s += exp(r - m);
  }
  return (own - m) - log(s);
}

template <class T>
std::vector<std::vector<T>> forward_all(const Model& model, const std::vector<Theta>& thetas,
                                        std::span<const T> lambda, SimBudget& budget) {
  for (const Theta& t : thetas) budget.charge(t.id);
  std::vector<std::vector<T>> out(thetas.size());
  parallel_for(thetas.size(), [&](std::size_t j) { out[j] = model.forward(thetas[j].values, lambda); });
  return out;
}

void check_contrast(const ContrastBatch& batch) {
  if (batch.contrast.size() != batch.outer.size()) throw std::invalid_argument("contrast batch: outer/inner size mismatch");
}

bool shares_inner_draws(const ContrastBatch& batch) {
  if (batch.contrast.size() < 2) return false;
  const auto& first = batch.contrast.front();
  for (const auto& inner : batch.contrast) {
    if (inner.size() != first.size()) return false;
    for (std::size_t j = 0; j < inner.size(); ++j) {
      if (inner[j].id != first[j].id) return false;
    }
  }
  return true;
}

}  // namespace

ContrastBatch draw_shared_contrast_batch(const Model& model, std::size_t M, std::size_t N, const RngStream& stream) {
  ContrastBatch batch;
  batch.outer = draw_batch(model, M, stream.child("outer"));
  Rng rng = stream.child("shared").engine();
  std::vector<Theta> inner;
  inner.reserve(N);
  for (std::size_t j = 0; j < N; ++j) inner.push_back(model.sample_prior(rng));
  batch.contrast.assign(M, inner);
  return batch;
}

PriorBatch draw_batch(const Model& model, std::size_t M, const RngStream& stream) {
  PriorBatch batch;
  batch.thetas.reserve(M);
  batch.noises.reserve(M);
  for (std::size_t i = 0; i < M; ++i) {
    Rng rng = stream.child(i).engine();
    batch.thetas.push_back(model.sample_prior(rng));
    batch.noises.push_back(model.sample_noise(rng));
  }
  return batch;
}

ContrastBatch draw_contrast_batch(const Model& model, std::size_t M, std::size_t N, const RngStream& stream) {
  ContrastBatch batch;
  batch.outer = draw_batch(model, M, stream.child("outer"));
  batch.contrast.resize(M);
  const RngStream inner = stream.child("inner");
  for (std::size_t i = 0; i < M; ++i) {
    Rng rng = inner.child(i).engine();
    batch.contrast[i].reserve(N);
    for (std::size_t j = 0; j < N; ++j) batch.contrast[i].push_back(model.sample_prior(rng));
  }
  return batch;
}

EigEstimate srnmc_value(const Model& model, std::span<const double> lambda, std::size_t M, const RngStream& stream,
                        SimBudget& budget) {
  if (M == 0) throw std::invalid_argument("srnmc_value: M must be >= 1");
  return srnmc_value(model, lambda, draw_batch(model, M, stream), budget);
}

EigEstimate srnmc_value(const Model& model, std::span<const double> lambda, const PriorBatch& batch,
                        SimBudget& budget) {
  const std::size_t M = batch.size();
  if (M == 0) throw std::invalid_argument("srnmc_value: empty batch");
  const std::uint64_t before = budget.forward_evals();
  const auto f = forward_all<double>(model, batch.thetas, lambda, budget);
  std::vector<double> terms(M);
  parallel_for(M, [&](std::size_t i) {
    const auto y = model.observe(f[i], batch.noises[i], lambda);
    std::vector<double> row(M);
    for (std::size_t j = 0; j < M; ++j) row[j] = model.log_likelihood_given(y, f[j], lambda);
    terms[i] = log_ratio_term(row, i, i);
  });
  return summarize(terms, std::log(static_cast<double>(M)), M, M, budget.forward_evals() - before);
}

Dual srnmc_objective(const Model& model, std::span<const Dual> lambda, const PriorBatch& batch, SimBudget& budget) {
  const std::size_t M = batch.size();
  if (M == 0) throw std::invalid_argument("srnmc_objective: empty batch");
  const auto f = forward_all<Dual>(model, batch.thetas, lambda, budget);
  std::vector<Dual> terms(M);
  parallel_for(M, [&](std::size_t i) {
    const auto y = model.observe(f[i], batch.noises[i], lambda);
    std::vector<Dual> row(M);
    for (std::size_t j = 0; j < M; ++j) row[j] = model.log_likelihood_given(y, f[j], lambda);
    terms[i] = dual_log_ratio_term(row, row[i], i);
  });
  Dual sum(0.0, lambda.size());
  for (const Dual& t : terms) sum += t;
  return sum / static_cast<double>(M) + std::log(static_cast<double>(M));
}

EigEstimate nmc_value(const Model& model, std::span<const double> lambda, std::size_t M, std::size_t N,
                      const RngStream& stream, SimBudget& budget) {
  if (M == 0 || N == 0) throw std::invalid_argument("nmc_value: M and N must be >= 1");
  return nmc_value(model, lambda, draw_contrast_batch(model, M, N, stream), budget);
}

EigEstimate nmc_value(const Model& model, std::span<const double> lambda, const ContrastBatch& batch,
                      SimBudget& budget) {
  check_contrast(batch);
  const std::size_t M = batch.outer.size();
  if (M == 0) throw std::invalid_argument("nmc_value: empty batch");
  const std::size_t N = batch.contrast.front().size();
  const std::uint64_t before = budget.forward_evals();
  for (const Theta& t : batch.outer.thetas) budget.charge(t.id);
  for (const auto& inner : batch.contrast) {
    if (inner.size() != N || N == 0) throw std::invalid_argument("nmc_value: ragged or empty inner batch");
    for (const Theta& t : inner) budget.charge(t.id);
  }
  // When every outer sample sees the same inner draws, simulate them once.
  std::vector<std::vector<double>> shared_f;
  if (shares_inner_draws(batch)) {
    shared_f.resize(N);
    parallel_for(N, [&](std::size_t j) { shared_f[j] = model.forward(batch.contrast[0][j].values, lambda); });
  }
  std::vector<double> terms(M);
  parallel_for(M, [&](std::size_t i) {
    const auto fi = model.forward(batch.outer.thetas[i].values, lambda);
    const auto y = model.observe(fi, batch.outer.noises[i], lambda);
    const double own = model.log_likelihood_given(y, fi, lambda);
    std::vector<double> row(N);
    for (std::size_t j = 0; j < N; ++j) {
      if (!shared_f.empty()) {
        row[j] = model.log_likelihood_given(y, shared_f[j], lambda);
        continue;
      }
      const auto fj = model.forward(batch.contrast[i][j].values, lambda);
      row[j] = model.log_likelihood_given(y, fj, lambda);
    }
    const double lme = simd::log_sum_exp(row.data(), row.size());
    if (lme == kNegInf) throw EstimatorError("no inner parameter explains observation " + std::to_string(i));
    terms[i] = own - (lme - std::log(static_cast<double>(N)));
  });
  return summarize(terms, 0.0, M, N, budget.forward_evals() - before);
}

EigEstimate pce_value(const Model& model, std::span<const double> lambda, std::size_t M, std::size_t N,
                      const RngStream& stream, SimBudget& budget) {
  if (M == 0) throw std::invalid_argument("pce_value: M must be >= 1");
  return pce_value(model, lambda, draw_contrast_batch(model, M, N, stream), budget);
}

EigEstimate pce_value(const Model& model, std::span<const double> lambda, const ContrastBatch& batch,
                      SimBudget& budget) {
  check_contrast(batch);
  const std::size_t M = batch.outer.size();
  if (M == 0) throw std::invalid_argument("pce_value: empty batch");
  const std::size_t N = batch.contrast.front().size();
  const std::uint64_t before = budget.forward_evals();
  for (const Theta& t : batch.outer.thetas) budget.charge(t.id);
  for (const auto& inner : batch.contrast) {
    if (inner.size() != N) throw std::invalid_argument("pce_value: ragged inner batch");
    for (const Theta& t : inner) budget.charge(t.id);
  }
  std::vector<double> terms(M);
  parallel_for(M, [&](std::size_t i) {
    const auto fi = model.forward(batch.outer.thetas[i].values, lambda);
    const auto y = model.observe(fi, batch.outer.noises[i], lambda);
    std::vector<double> row(N + 1);
    row[0] = model.log_likelihood_given(y, fi, lambda);
    for (std::size_t j = 0; j < N; ++j) {
      const auto fj = model.forward(batch.contrast[i][j].values, lambda);
      row[j + 1] = model.log_likelihood_given(y, fj, lambda);
    }
    terms[i] = log_ratio_term(row, 0, i);
  });
  return summarize(terms, std::log(static_cast<double>(N + 1)), M, N, budget.forward_evals() - before);
}

Dual pce_objective(const Model& model, std::span<const Dual> lambda, const ContrastBatch& batch, SimBudget& budget) {
  check_contrast(batch);
  const std::size_t M = batch.outer.size();
  if (M == 0) throw std::invalid_argument("pce_objective: empty batch");
  const std::size_t N = batch.contrast.front().size();
  for (const Theta& t : batch.outer.thetas) budget.charge(t.id);
  for (const auto& inner : batch.contrast) {
    for (const Theta& t : inner) budget.charge(t.id);
  }
  std::vector<Dual> terms(M);
  parallel_for(M, [&](std::size_t i) {
    const auto fi = model.forward(batch.outer.thetas[i].values, lambda);
    const auto y = model.observe(fi, batch.outer.noises[i], lambda);
    std::vector<Dual> row(N + 1);
    row[0] = model.log_likelihood_given(y, fi, lambda);
    for (std::size_t j = 0; j < N; ++j) {
      const auto fj = model.forward(batch.contrast[i][j].values, lambda);
      row[j + 1] = model.log_likelihood_given(y, fj, lambda);
    }
    terms[i] = dual_log_ratio_term(row, row[0], i);
  });
  Dual sum(0.0, lambda.size());
  for (const Dual& t : terms) sum += t;
  return sum / static_cast<double>(M) + std::log(static_cast<double>(N + 1));
}

}  // namespace gradeig
