#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Core>

#include "borda/random.hpp"

namespace borda {

enum class LinkFunction { Logistic, GaussianCdf };

std::string_view to_string(LinkFunction link);
LinkFunction parse_link(std::string_view name);

/// Smallest probability a duel can have; outcomes are never deterministic.
inline constexpr double kMinDuelProbability = 1e-12;

/// sigma(gap), clamped to [kMinDuelProbability, 1 - kMinDuelProbability].
double link_probability(LinkFunction link, double gap);

/// r(z) = amplitude * sum_i w_i cos(omega_i . z + b_i), amplitude = sqrt(2 / m).
/// Frequencies are Gaussian with standard deviation 1 / lengthscale, which
/// makes r an approximate sample from a unit-variance SE-kernel process.
struct RFFReward {
  Eigen::MatrixXd frequencies;  // m x input_dim
  Eigen::VectorXd phases;
  Eigen::VectorXd coefficients;
  double amplitude = 0.0;

  Eigen::Index input_dim() const { return frequencies.cols(); }
  Eigen::Index num_features() const { return frequencies.rows(); }
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& z) const;
  /// amplitude * sum |w_i|.
  double magnitude_bound() const;
};

RFFReward sample_rff(Eigen::Index input_dim, Eigen::Index num_features, double lengthscale, Rng& rng);

struct EnvSpec {
  Eigen::Index context_dim = 1;
  Eigen::Index action_dim = 1;
  Eigen::Index num_features = 256;
  double lengthscale = 0.3;
  LinkFunction link = LinkFunction::Logistic;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Ground-truth world on the unit box: a sampled reward plus a link function.
class SyntheticEnv {
 public:
  SyntheticEnv(EnvSpec spec, RFFReward reward);

  const EnvSpec& spec() const { return spec_; }
  const RFFReward& reward_function() const { return reward_; }
  Eigen::Index context_dim() const { return spec_.context_dim; }
  Eigen::Index action_dim() const { return spec_.action_dim; }

  double reward(const Eigen::Ref<const Eigen::VectorXd>& context,
                const Eigen::Ref<const Eigen::VectorXd>& action) const;

  /// P(action beats opponent | context).
  double duel_prob(const Eigen::Ref<const Eigen::VectorXd>& context, const Eigen::Ref<const Eigen::VectorXd>& action,
                   const Eigen::Ref<const Eigen::VectorXd>& opponent) const;

  int duel_outcome(const Eigen::Ref<const Eigen::VectorXd>& context, const Eigen::Ref<const Eigen::VectorXd>& action,
                   const Eigen::Ref<const Eigen::VectorXd>& opponent, Rng& rng) const;

  /// Borda value by quadrature over a finite opponent grid (one action per row).
  double true_borda(const Eigen::Ref<const Eigen::VectorXd>& context, const Eigen::Ref<const Eigen::VectorXd>& action,
                    const Eigen::Ref<const Eigen::MatrixXd>& action_grid) const;

  /// Borda value from `samples` opponents drawn uniformly from the action box.
  double monte_carlo_borda(const Eigen::Ref<const Eigen::VectorXd>& context,
                           const Eigen::Ref<const Eigen::VectorXd>& action, int samples, Rng& rng) const;

 private:
  void check_domain(const Eigen::Ref<const Eigen::VectorXd>& context,
                    const Eigen::Ref<const Eigen::VectorXd>& action) const;

  EnvSpec spec_;
  RFFReward reward_;
};

SyntheticEnv sample_env(const EnvSpec& spec);

/// Rewards r(context_i, action_j).
Eigen::MatrixXd reward_surface(const SyntheticEnv& env, const Eigen::Ref<const Eigen::MatrixXd>& contexts,
                               const Eigen::Ref<const Eigen::MatrixXd>& actions);

/// Grid-quadrature Borda values; the opponent grid is the action grid itself.
Eigen::MatrixXd borda_surface(const SyntheticEnv& env, const Eigen::Ref<const Eigen::MatrixXd>& contexts,
                              const Eigen::Ref<const Eigen::MatrixXd>& actions);

/// Borda values at many joint points (rows: context then action) against one
/// shared opponent set (rows: actions). Equivalent to calling true_borda with
/// `opponents` as the grid for each point, computed in batch.
Eigen::VectorXd borda_against(const SyntheticEnv& env, const Eigen::Ref<const Eigen::MatrixXd>& points,
                              const Eigen::Ref<const Eigen::MatrixXd>& opponents);

}  // namespace borda
