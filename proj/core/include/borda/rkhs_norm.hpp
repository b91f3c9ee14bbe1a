#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "borda/kernel.hpp"
#include "borda/synthetic_env.hpp"

namespace borda {

enum class NormTarget { Reward, Borda };

std::string_view to_string(NormTarget target);

struct NormEstimate {
  NormTarget target = NormTarget::Reward;
  Eigen::Index context_dim = 0;
  Eigen::Index action_dim = 0;
  Eigen::Index sample_points = 0;
  double regularization = 0.0;
  double norm_value = 0.0;
};

/// sqrt(alpha' K alpha) with (K + reg I) alpha = values. `kernel.jitter` is
/// ignored; `reg` is the only diagonal shift.
double rkhs_norm_on_points(const KernelSpec& kernel, const Eigen::Ref<const Eigen::MatrixXd>& points,
                           const Eigen::Ref<const Eigen::VectorXd>& values, double reg);

using EvaluableFunction = std::function<double(const Eigen::VectorXd&)>;

/// Samples `n` uniform points in [0,1]^(context_dim + action_dim) from `seed`
/// and estimates the RKHS norm of f from its values there.
NormEstimate estimate_norm(const EvaluableFunction& f, Eigen::Index context_dim, Eigen::Index action_dim,
                           Eigen::Index n, const KernelSpec& kernel, double reg, std::uint64_t seed,
                           NormTarget target = NormTarget::Reward);

struct NormStudyOptions {
  Eigen::Index sample_points = 1000;
  double regularization = 1e-6;
  Eigen::Index num_features = 256;
  double lengthscale = 0.3;
  // Lengthscale of the SE kernel used for the norm solve; <= 0 reuses the
  // reward lengthscale.
  double kernel_lengthscale = 0.0;
  LinkFunction link = LinkFunction::Logistic;
  // true: one opponent set shared by every sample point; false: fresh
  // opponents for each point.
  bool shared_opponents = true;
  std::size_t workers = 1;
};

struct NormTrialFailure {
  int trial = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct NormComparison {
  Eigen::Index context_dim = 0;
  Eigen::Index action_dim = 0;
  int trials = 0;
  int completed = 0;
  double win_rate = 0.0;
  double win_margin = 0.0;
  std::vector<double> reward_norms;
  std::vector<double> borda_norms;
  std::vector<NormTrialFailure> failures;
};

/// Norm of one sampled reward and of its Borda function. The Borda function
/// is estimated against one shared set of `mc_samples` uniform opponents, so
/// the estimate is itself a smooth function of (context, action).
std::pair<NormEstimate, NormEstimate> norm_pair(const SyntheticEnv& env, int mc_samples, std::uint64_t seed,
                                                const NormStudyOptions& options);

/// Win rate: fraction of trials where the Borda norm is below the reward norm.
/// Win margin: mean of (reward norm - Borda norm).
NormComparison compare_norms(Eigen::Index context_dim, Eigen::Index action_dim, int trials, int mc_samples,
                             std::uint64_t seed, const NormStudyOptions& options = {});

}  // namespace borda
