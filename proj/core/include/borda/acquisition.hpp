#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Core>

#include "borda/duel_model.hpp"
#include "borda/random.hpp"

namespace borda {

/// Finite candidate sets for contexts and actions, one point per row.
struct CandidateGrids {
  Eigen::MatrixXd contexts;
  Eigen::MatrixXd actions;
  std::uint64_t seed = 0;

  Eigen::Index num_contexts() const { return contexts.rows(); }
  Eigen::Index num_actions() const { return actions.rows(); }

  /// Nonempty, inside the unit box, no duplicate rows, matching dimensions.
  void validate(Eigen::Index context_dim, Eigen::Index action_dim) const;
};

/// Points covering [0,1]^dim: a regular lattice of `per_dim` points per axis
/// when dim <= 2, otherwise `sobol_size` Sobol points (offset by `seed`).
/// dim == 0 yields a single empty point.
Eigen::MatrixXd box_grid(Eigen::Index dim, Eigen::Index per_dim, Eigen::Index sobol_size = 1024,
                         std::uint64_t seed = 0);

CandidateGrids make_grids(Eigen::Index context_dim, Eigen::Index action_dim, Eigen::Index per_dim,
                          Eigen::Index sobol_size = 1024, std::uint64_t seed = 0);

enum class Strategy { BordaAE, BordaUCB, BordaUniform };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

/// First index of the maximum; ties resolve to the lowest index.
Eigen::Index argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& values);

/// Per-context gap between the optimistic and pessimistic value functions:
/// max_a upper(x, a) - max_a lower(x, a).
Eigen::VectorXd context_objective(const BoundSurface& bounds);

Eigen::Index select_context(const BoundSurface& bounds);
Eigen::Index select_context(const BordaEstimate& model, const CandidateGrids& grids);

Eigen::Index select_action_optimistic(const BoundSurface& bounds, Eigen::Index context_index);
Eigen::Index select_action_optimistic(const BordaEstimate& model, const Eigen::Ref<const Eigen::VectorXd>& context,
                                      const CandidateGrids& grids);

struct DuelProposal {
  Eigen::Index context_index = 0;
  Eigen::Index action_index = 0;
  Eigen::Index opponent_index = 0;
  Eigen::VectorXd context;
  Eigen::VectorXd action;
  Eigen::VectorXd opponent;
  bool opponent_uniform = true;

  DuelObservation observe(int outcome, std::size_t round) const;
};

/// Context, action and opponent all drawn uniformly from the grids.
DuelProposal uniform_duel(const CandidateGrids& grids, Rng& rng);

/// Strategy dispatch on precomputed bounds. The opponent is always uniform.
DuelProposal propose_duel(Strategy strategy, const BoundSurface& bounds, const CandidateGrids& grids, Rng& rng);
DuelProposal propose_duel(Strategy strategy, const BordaEstimate& model, const CandidateGrids& grids, Rng& rng);

}  // namespace borda
