#pragma once

#include <cstddef>
#include <string_view>

#include <Eigen/Core>

#include "borda/kernel.hpp"
#include "borda/krr.hpp"

namespace borda {

/// One labeled comparison: was `action` preferred to `opponent` at `context`?
struct DuelObservation {
  Eigen::VectorXd context;
  Eigen::VectorXd action;
  Eigen::VectorXd opponent;
  int outcome = 0;
  std::size_t round = 0;
  // The Borda reduction is only unbiased when the opponent is drawn uniformly.
  bool opponent_uniform = true;
};

enum class BetaMode {
  GreedyOnline,    // info gain accumulated at queried points
  AnalyticLinear,  // info gain pinned to d * log t
  Fixed,           // constant multiplier ("beta-lite")
};

std::string_view to_string(BetaMode mode);
BetaMode parse_beta_mode(std::string_view name);

/// Confidence-width schedule beta_t = 2B + sqrt(2 * Phi_{t-1} + 1 + log(2 / delta)).
struct BetaSchedule {
  double rkhs_bound = 2.0;
  double delta = 0.05;
  double accumulated_info_gain = 0.0;
  BetaMode mode = BetaMode::GreedyOnline;
  double fixed_beta = 2.0;
  // Input dimension used by the analytic-linear mode.
  Eigen::Index linear_dim = 0;

  void validate() const;

  /// Multiplier to use after `rounds_seen` observations.
  double beta(std::size_t rounds_seen) const;

  /// Information-gain term Phi used for `rounds_seen` observations.
  double info_gain(std::size_t rounds_seen) const;
};

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Kernel ridge regression estimate of the contextual Borda function over
/// joint (context, action) points. Outcomes are regressed around a prior mean
/// of 1/2; the opponent action is kept for audit only.
class BordaEstimate {
 public:
  static constexpr double kPriorMean = 0.5;

  BordaEstimate(Eigen::Index context_dim, Eigen::Index action_dim, KernelSpec kernel, double noise_variance,
                BetaSchedule schedule);

  /// Adds one observation. Rejects non-uniform opponents, out-of-box
  /// coordinates and outcomes other than 0/1.
  void ingest(const DuelObservation& obs);

  Prediction predict(const Eigen::Ref<const Eigen::VectorXd>& context,
                     const Eigen::Ref<const Eigen::VectorXd>& action) const;
  ConfidenceInterval confidence_bounds(const Eigen::Ref<const Eigen::VectorXd>& context,
                                       const Eigen::Ref<const Eigen::VectorXd>& action) const;
  double beta() const { return schedule_.beta(rounds_seen_); }

  Eigen::VectorXd joint(const Eigen::Ref<const Eigen::VectorXd>& context,
                        const Eigen::Ref<const Eigen::VectorXd>& action) const;

  const PosteriorState& posterior() const { return posterior_; }
  const BetaSchedule& schedule() const { return schedule_; }
  std::size_t rounds_seen() const { return rounds_seen_; }
  Eigen::Index context_dim() const { return context_dim_; }
  Eigen::Index action_dim() const { return action_dim_; }

  /// Sum over ingested points of the posterior variance at that point just
  /// before it was added.
  double queried_variance_sum() const { return queried_variance_sum_; }

 private:
  Eigen::Index context_dim_;
  Eigen::Index action_dim_;
  PosteriorState posterior_;
  BetaSchedule schedule_;
  std::size_t rounds_seen_ = 0;
  double queried_variance_sum_ = 0.0;
};

BordaEstimate ingest(BordaEstimate model, const DuelObservation& obs);

ConfidenceInterval confidence_bounds(const BordaEstimate& model, const Eigen::Ref<const Eigen::VectorXd>& context,
                                     const Eigen::Ref<const Eigen::VectorXd>& action);

/// Bounds over a context grid x action grid; entry (i, j) is (context i, action j).
struct BoundSurface {
  Eigen::MatrixXd lower;
  Eigen::MatrixXd upper;
};

/// Joint points, row i * actions.rows() + j holding (context i, action j).
Eigen::MatrixXd joint_grid(const Eigen::Ref<const Eigen::MatrixXd>& contexts,
                           const Eigen::Ref<const Eigen::MatrixXd>& actions);

/// Point-by-point evaluation of the bounds on a grid.
BoundSurface bound_surface(const BordaEstimate& model, const Eigen::Ref<const Eigen::MatrixXd>& contexts,
                           const Eigen::Ref<const Eigen::MatrixXd>& actions);

/// Incrementally maintained posterior over a fixed context x action grid.
class SurfaceTracker {
 public:
  SurfaceTracker(const BordaEstimate& model, Eigen::MatrixXd contexts, Eigen::MatrixXd actions);

  void sync(const BordaEstimate& model);

  Eigen::Index num_contexts() const { return contexts_.rows(); }
  Eigen::Index num_actions() const { return actions_.rows(); }

  Eigen::MatrixXd mean() const;
  Eigen::MatrixXd stddev() const;
  BoundSurface bounds(double beta) const;

 private:
  Eigen::MatrixXd reshape(const Eigen::VectorXd& flat) const;

  Eigen::MatrixXd contexts_;
  Eigen::MatrixXd actions_;
  QueryCache cache_;
};

}  // namespace borda
