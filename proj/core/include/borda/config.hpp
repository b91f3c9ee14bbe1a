#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "borda/acquisition.hpp"
#include "borda/duel_model.hpp"
#include "borda/errors.hpp"
#include "borda/kernel.hpp"
#include "borda/synthetic_env.hpp"

namespace borda {

class ConfigError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

struct NormRow {
  Eigen::Index context_dim = 0;
  Eigen::Index action_dim = 1;
};

/// Everything a run needs. Read from a flat `key = value` text file; every
/// key is optional and falls back to the defaults below.
struct ExperimentConfig {
  // world
  Eigen::Index context_dim = 1;
  Eigen::Index action_dim = 1;
  Eigen::Index env_features = 256;
  double env_lengthscale = 0.3;
  LinkFunction link = LinkFunction::Logistic;

  // model
  KernelFamily model_kernel = KernelFamily::SquaredExponential;
  std::vector<double> model_lengthscales{0.3};  // one value broadcasts to every joint dimension
  double model_signal_variance = 0.25;
  double model_jitter = -1.0;                   // < 0: 1e-6 * signal variance
  double noise_variance = 0.25;
  double rkhs_bound = 2.0;
  double delta = 0.05;
  BetaMode beta_mode = BetaMode::GreedyOnline;
  double fixed_beta = 2.0;

  // protocol
  std::size_t n0 = 25;
  std::size_t horizon = 500;
  Eigen::Index grid_per_dim = 64;
  Eigen::Index sobol_size = 1024;
  std::uint64_t grid_seed = 0;
  std::vector<Strategy> strategies{Strategy::BordaAE, Strategy::BordaUCB, Strategy::BordaUniform};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::size_t eval_every = 25;
  std::vector<std::size_t> dump_rounds{50, 150, 500};
  bool track_coverage = false;
  bool record_timing = false;
  bool log_duels = true;

  // execution
  std::size_t workers = 1;
  std::string output_dir = "results";

  // norm study
  std::vector<NormRow> norm_rows{{0, 1}, {1, 1}, {1, 3}, {3, 1}, {3, 3}};
  int norm_trials = 200;
  int norm_mc_samples = 512;
  Eigen::Index norm_sample_points = 1000;
  double norm_regularization = 1e-6;
  double norm_kernel_lengthscale = 0.0;
  bool norm_shared_opponents = true;
  std::uint64_t norm_seed = 0;

  /// Throws ConfigError on any violated invariant.
  void validate() const;

  KernelSpec model_kernel_spec() const;
  BetaSchedule beta_schedule() const;
  EnvSpec env_spec(std::uint64_t seed) const;
};

/// Parses `key = value` lines; '#' starts a comment. Unknown keys and
/// malformed values raise ConfigError naming the line.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path);

/// Applies one `key=value` override (as given on the command line).
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Every key with its resolved value, one per line, in a fixed order.
std::string to_text(const ExperimentConfig& config);

/// FNV-1a of to_text(config), rendered as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace borda
