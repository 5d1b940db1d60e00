#pragma once

// Experiment configuration read from YAML.
//
// Every section rejects keys it does not know, and every error names the
// file, line and dotted field path, e.g.
//   configs/toy.yaml:7:3: optim.learning_rate: must be > 0

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gradeig/model.hpp"
#include "gradeig/models/pk.hpp"
#include "gradeig/models/stat5.hpp"
#include "gradeig/optim.hpp"
#include "gradeig/sampler.hpp"
#include "gradeig/validate.hpp"

namespace gradeig {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  std::string kind = "toy";  // linear | toy | pk | stat5
  std::size_t linear_n = 3;
  double linear_sigma2 = 1.0;
  double toy_sigma = 0.1;
  models::PkNoise pk_noise;
  std::size_t pk_n_times = 10;
  double pk_t_max = 24.0;
  models::Stat5Config stat5;
  /// Empty selects the synthetic pulse.
  std::filesystem::path epo_csv;
};

struct ValidateConfig {
  std::size_t trials = 50;
  std::size_t kde_n = 200;
  std::size_t nmc_M = kNmcValidateDefault;
  std::size_t nmc_N = kNmcValidateDefault;
  /// Sampler for posterior_entropy; defaults to the top-level sampler block.
  SamplerConfig sampler;
};

struct ExperimentConfig {
  ModelConfig model;
  EstimatorConfig estimator;
  OptimConfig optim;
  ValidateConfig validate;
  BiasStudyConfig bias;
  /// Design for grad / eig / entropy.
  std::optional<std::vector<double>> design;
  /// Optimizer start; drawn uniformly from the box when absent.
  std::optional<std::vector<double>> init;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  unsigned threads = 1;

  /// Raw config text, hashed into run metadata.
  std::string source_text;
};

ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>",
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

std::unique_ptr<Model> make_model(const ModelConfig& cfg);

/// 16 hex digits of FNV-1a over `text`.
std::string content_hash(const std::string& text);

}  // namespace gradeig
