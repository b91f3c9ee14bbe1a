#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "borda/acquisition.hpp"
#include "borda/duel_model.hpp"
#include "borda/synthetic_env.hpp"

namespace borda {

/// Running maximum over rounds of the lower confidence surface on a fixed
/// context x action grid. Starts at -inf everywhere.
class LowerEnvelope {
 public:
  LowerEnvelope(Eigen::Index num_contexts, Eigen::Index num_actions);
  explicit LowerEnvelope(const CandidateGrids& grids);

  void absorb(const Eigen::Ref<const Eigen::MatrixXd>& lower);
  void absorb(const BoundSurface& bounds) { absorb(bounds.lower); }

  const Eigen::MatrixXd& values() const { return values_; }
  std::size_t rounds_absorbed() const { return rounds_absorbed_; }

 private:
  Eigen::MatrixXd values_;
  std::size_t rounds_absorbed_ = 0;
};

/// Folds the model's current lower bounds on `grids` into the envelope.
LowerEnvelope absorb_round(LowerEnvelope env, const BordaEstimate& model, const CandidateGrids& grids);

struct PolicyTable {
  std::vector<Eigen::Index> action_index;  // per context
  Eigen::VectorXd value;                   // pessimistic value of the chosen action
};

/// Per-context argmax of the envelope, lowest index on ties.
PolicyTable extract_policy(const LowerEnvelope& env);

struct RegretProfile {
  double max_regret = 0.0;
  double median_regret = 0.0;
  Eigen::Index worst_context = 0;
  Eigen::VectorXd per_context;
};

/// Regret of the policy against the best grid action of each context, given
/// precomputed rewards (rows: contexts, columns: actions).
RegretProfile regret_profile(const PolicyTable& policy, const Eigen::Ref<const Eigen::MatrixXd>& rewards);
RegretProfile regret_profile(const PolicyTable& policy, const SyntheticEnv& env, const CandidateGrids& grids);

double median(Eigen::VectorXd values);

}  // namespace borda
