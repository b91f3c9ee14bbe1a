#include "borda/acquisition.hpp"

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <boost/random/sobol.hpp>
#include <boost/random/uniform_01.hpp>

#include "borda/errors.hpp"

namespace borda {
namespace {

Eigen::Index uniform_index(Eigen::Index n, Rng& rng) {
  std::uniform_int_distribution<Eigen::Index> dist(0, n - 1);
  return dist(rng);
}

void check_surface(const BoundSurface& bounds) {
  if (bounds.upper.size() == 0 || bounds.lower.rows() != bounds.upper.rows() ||
      bounds.lower.cols() != bounds.upper.cols()) {
    throw InvalidInput("acquisition: empty or inconsistent bound surface");
  }
}

void check_grid(const Eigen::MatrixXd& points, Eigen::Index dim, const char* what) {
  if (points.rows() == 0) throw InvalidInput(std::string("candidate grids: empty ") + what + " grid");
  if (points.cols() != dim) throw InvalidInput(std::string("candidate grids: ") + what + " dimension mismatch");
  if (!((points.array() >= 0.0) && (points.array() <= 1.0)).all()) {
    throw InvalidInput(std::string("candidate grids: ") + what + " outside the unit box");
  }
  std::set<std::vector<double>> seen;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(points.cols()));
    for (Eigen::Index d = 0; d < points.cols(); ++d) row[static_cast<std::size_t>(d)] = points(i, d);
    if (!seen.insert(std::move(row)).second) {
      throw InvalidInput(std::string("candidate grids: duplicate ") + what + " point at row " + std::to_string(i));
    }
  }
}

}  // namespace

void CandidateGrids::validate(Eigen::Index context_dim, Eigen::Index action_dim) const {
  check_grid(contexts, context_dim, "context");
  check_grid(actions, action_dim, "action");
}

Eigen::MatrixXd box_grid(Eigen::Index dim, Eigen::Index per_dim, Eigen::Index sobol_size, std::uint64_t seed) {
  if (dim < 0) throw InvalidInput("box_grid: negative dimension");
  if (dim == 0) return Eigen::MatrixXd(1, 0);
  if (dim <= 2) {
    if (per_dim < 1) throw InvalidInput("box_grid: need at least one point per dimension");
    Eigen::VectorXd axis = Eigen::VectorXd::LinSpaced(per_dim, 0.0, 1.0);
    if (per_dim == 1) axis(0) = 0.5;
    if (dim == 1) return axis;
    Eigen::MatrixXd out(per_dim * per_dim, 2);
    for (Eigen::Index i = 0; i < per_dim; ++i) {
      for (Eigen::Index j = 0; j < per_dim; ++j) out.row(i * per_dim + j) << axis(i), axis(j);
    }
    return out;
  }
  if (sobol_size < 1) throw InvalidInput("box_grid: need at least one Sobol point");
  boost::random::sobol engine(static_cast<std::size_t>(dim));
  // The first Sobol point is the origin; skip it plus a seed-dependent offset.
  engine.discard(static_cast<std::uintmax_t>(dim) * (1 + seed % 4096));
  boost::random::uniform_01<double> unit;
  Eigen::MatrixXd out(sobol_size, dim);
  for (Eigen::Index i = 0; i < sobol_size; ++i) {
    for (Eigen::Index d = 0; d < dim; ++d) out(i, d) = unit(engine);
  }
  return out;
}

CandidateGrids make_grids(Eigen::Index context_dim, Eigen::Index action_dim, Eigen::Index per_dim,
                          Eigen::Index sobol_size, std::uint64_t seed) {
  CandidateGrids grids{box_grid(context_dim, per_dim, sobol_size, seed),
                       box_grid(action_dim, per_dim, sobol_size, seed + 1), seed};
  grids.validate(context_dim, action_dim);
  return grids;
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::BordaAE:
      return "borda-ae";
    case Strategy::BordaUCB:
      return "borda-ucb";
    case Strategy::BordaUniform:
      return "borda-uniform";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "borda-ae") return Strategy::BordaAE;
  if (name == "borda-ucb") return Strategy::BordaUCB;
  if (name == "borda-uniform") return Strategy::BordaUniform;
  throw InvalidInput("unknown strategy '" + std::string(name) + "'");
}

Eigen::Index argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& values) {
  if (values.size() == 0) throw InvalidInput("argmax over an empty set");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) > values(best)) best = i;
  }
  return best;
}

Eigen::VectorXd context_objective(const BoundSurface& bounds) {
  check_surface(bounds);
  return bounds.upper.rowwise().maxCoeff() - bounds.lower.rowwise().maxCoeff();
}

Eigen::Index select_context(const BoundSurface& bounds) { return argmax_lowest(context_objective(bounds)); }

Eigen::Index select_context(const BordaEstimate& model, const CandidateGrids& grids) {
  grids.validate(model.context_dim(), model.action_dim());
  return select_context(bound_surface(model, grids.contexts, grids.actions));
}

Eigen::Index select_action_optimistic(const BoundSurface& bounds, Eigen::Index context_index) {
  check_surface(bounds);
  if (context_index < 0 || context_index >= bounds.upper.rows()) {
    throw InvalidInput("select_action_optimistic: context index out of range");
  }
  return argmax_lowest(bounds.upper.row(context_index).transpose());
}

Eigen::Index select_action_optimistic(const BordaEstimate& model, const Eigen::Ref<const Eigen::VectorXd>& context,
                                      const CandidateGrids& grids) {
  grids.validate(model.context_dim(), model.action_dim());
  Eigen::VectorXd upper(grids.num_actions());
  for (Eigen::Index j = 0; j < grids.num_actions(); ++j) {
    upper(j) = model.confidence_bounds(context, grids.actions.row(j).transpose()).upper;
  }
  return argmax_lowest(upper);
}

DuelObservation DuelProposal::observe(int outcome, std::size_t round) const {
  return DuelObservation{context, action, opponent, outcome, round, opponent_uniform};
}

namespace {

DuelProposal materialize(const CandidateGrids& grids, Eigen::Index ci, Eigen::Index ai, Eigen::Index oi) {
  DuelProposal p;
  p.context_index = ci;
  p.action_index = ai;
  p.opponent_index = oi;
  p.context = grids.contexts.row(ci).transpose();
  p.action = grids.actions.row(ai).transpose();
  p.opponent = grids.actions.row(oi).transpose();
  p.opponent_uniform = true;
  return p;
}

}  // namespace

DuelProposal uniform_duel(const CandidateGrids& grids, Rng& rng) {
  if (grids.num_contexts() == 0 || grids.num_actions() == 0) throw InvalidInput("uniform_duel: empty grid");
  const Eigen::Index ci = uniform_index(grids.num_contexts(), rng);
  const Eigen::Index ai = uniform_index(grids.num_actions(), rng);
  const Eigen::Index oi = uniform_index(grids.num_actions(), rng);
  return materialize(grids, ci, ai, oi);
}

DuelProposal propose_duel(Strategy strategy, const BoundSurface& bounds, const CandidateGrids& grids, Rng& rng) {
  if (grids.num_contexts() == 0 || grids.num_actions() == 0) throw InvalidInput("propose_duel: empty grid");
  if (strategy == Strategy::BordaUniform) return uniform_duel(grids, rng);
  check_surface(bounds);
  if (bounds.upper.rows() != grids.num_contexts() || bounds.upper.cols() != grids.num_actions()) {
    throw InvalidInput("propose_duel: bound surface does not match the grids");
  }
  const Eigen::Index ci =
      strategy == Strategy::BordaAE ? select_context(bounds) : uniform_index(grids.num_contexts(), rng);
  const Eigen::Index ai = select_action_optimistic(bounds, ci);
  const Eigen::Index oi = uniform_index(grids.num_actions(), rng);
  return materialize(grids, ci, ai, oi);
}

DuelProposal propose_duel(Strategy strategy, const BordaEstimate& model, const CandidateGrids& grids, Rng& rng) {
  grids.validate(model.context_dim(), model.action_dim());
  if (strategy == Strategy::BordaUniform) return uniform_duel(grids, rng);
  return propose_duel(strategy, bound_surface(model, grids.contexts, grids.actions), grids, rng);
}

}  // namespace borda
