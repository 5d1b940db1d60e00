#pragma once

// Nested Monte Carlo estimators of the expected information gain.
//
//   NMC    independent inner prior draws per outer sample, cost M*N + M
//   srNMC  the outer batch doubles as the inner batch, cost M; never exceeds log M
//   PCE    the outer parameter joins N fresh contrastive draws, cost M*(N+1);
//          never exceeds log(N+1)
//
// Inner averages are formed in log space. std_error is the sample standard
// deviation of the M outer terms over sqrt(M) and ignores inner-loop bias.

#include <cstdint>
#include <span>
#include <vector>

#include "gradeig/dual.hpp"
#include "gradeig/model.hpp"
#include "gradeig/rng.hpp"

namespace gradeig {

struct EigEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t M = 0;
  std::size_t N = 0;
  std::uint64_t forward_evals_used = 0;
};

/// Outer batch of (theta, eps) pairs drawn from prior x noise.
struct PriorBatch {
  std::vector<Theta> thetas;
  std::vector<std::vector<double>> noises;
  std::size_t size() const noexcept { return thetas.size(); }
};

/// Contrastive draws for PCE / NMC: contrast[i] holds the N inner draws of outer sample i.
struct ContrastBatch {
  PriorBatch outer;
  std::vector<std::vector<Theta>> contrast;
};

PriorBatch draw_batch(const Model& model, std::size_t M, const RngStream& stream);
ContrastBatch draw_contrast_batch(const Model& model, std::size_t M, std::size_t N, const RngStream& stream);
/// One set of N inner draws shared by all M outer samples (same ids). NMC on
/// such a batch simulates the inner draws once: cost M + N instead of M N + M.
/// The estimate is still consistent; its terms are no longer independent, so
/// std_error is optimistic.
ContrastBatch draw_shared_contrast_batch(const Model& model, std::size_t M, std::size_t N, const RngStream& stream);

class EstimatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

EigEstimate nmc_value(const Model& model, std::span<const double> lambda, std::size_t M, std::size_t N,
                      const RngStream& stream, SimBudget& budget);
/// NMC on explicit inner draws (contrast[i] are the inner samples of outer i).
EigEstimate nmc_value(const Model& model, std::span<const double> lambda, const ContrastBatch& batch,
                      SimBudget& budget);

EigEstimate srnmc_value(const Model& model, std::span<const double> lambda, std::size_t M, const RngStream& stream,
                        SimBudget& budget);
EigEstimate srnmc_value(const Model& model, std::span<const double> lambda, const PriorBatch& batch,
                        SimBudget& budget);

EigEstimate pce_value(const Model& model, std::span<const double> lambda, std::size_t M, std::size_t N,
                      const RngStream& stream, SimBudget& budget);
EigEstimate pce_value(const Model& model, std::span<const double> lambda, const ContrastBatch& batch,
                      SimBudget& budget);

/// srNMC written with elementary Dual operations; its tangent is the
/// autodiff gradient of the srNMC estimate on a frozen batch.
Dual srnmc_objective(const Model& model, std::span<const Dual> lambda, const PriorBatch& batch, SimBudget& budget);
/// Same for PCE.
Dual pce_objective(const Model& model, std::span<const Dual> lambda, const ContrastBatch& batch, SimBudget& budget);

}  // namespace gradeig
