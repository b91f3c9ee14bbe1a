#include "borda/duel_model.hpp"

#include <cmath>
#include <string>

#include "borda/errors.hpp"

namespace borda {
namespace {

void check_box(const Eigen::Ref<const Eigen::VectorXd>& v, Eigen::Index dim, const char* what) {
  if (v.size() != dim) {
    throw InvalidInput(std::string("duel observation: ") + what + " has dimension " + std::to_string(v.size()) +
                       ", expected " + std::to_string(dim));
  }
  if (!((v.array() >= 0.0) && (v.array() <= 1.0)).all()) {
    throw InvalidInput(std::string("duel observation: ") + what + " lies outside the unit box");
  }
}

}  // namespace

std::string_view to_string(BetaMode mode) {
  switch (mode) {
    case BetaMode::GreedyOnline:
      return "greedy-online";
    case BetaMode::AnalyticLinear:
      return "analytic-linear";
    case BetaMode::Fixed:
      return "fixed";
  }
  return "unknown";
}

BetaMode parse_beta_mode(std::string_view name) {
  if (name == "greedy-online" || name == "theoretical") return BetaMode::GreedyOnline;
  if (name == "analytic-linear") return BetaMode::AnalyticLinear;
  if (name == "fixed" || name == "beta-lite") return BetaMode::Fixed;
  throw InvalidInput("unknown beta mode '" + std::string(name) + "'");
}

void BetaSchedule::validate() const {
  if (!(rkhs_bound > 0.0)) throw InvalidInput("beta schedule: B must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("beta schedule: delta must lie in (0, 1)");
  if (!(accumulated_info_gain >= 0.0)) throw InvalidInput("beta schedule: info gain must be nonnegative");
  if (mode == BetaMode::Fixed && !(fixed_beta >= 0.0)) throw InvalidInput("beta schedule: fixed beta must be >= 0");
  if (mode == BetaMode::AnalyticLinear && linear_dim <= 0) {
    throw InvalidInput("beta schedule: analytic-linear mode needs a positive dimension");
  }
}

double BetaSchedule::info_gain(std::size_t rounds_seen) const {
  if (mode == BetaMode::AnalyticLinear) {
    return rounds_seen > 1 ? static_cast<double>(linear_dim) * std::log(static_cast<double>(rounds_seen)) : 0.0;
  }
  return accumulated_info_gain;
}

double BetaSchedule::beta(std::size_t rounds_seen) const {
  if (mode == BetaMode::Fixed) {
    return fixed_beta;
  }
  return 2.0 * rkhs_bound + std::sqrt(2.0 * info_gain(rounds_seen) + 1.0 + std::log(2.0 / delta));
}

BordaEstimate::BordaEstimate(Eigen::Index context_dim, Eigen::Index action_dim, KernelSpec kernel,
                             double noise_variance, BetaSchedule schedule)
    : context_dim_(context_dim),
      action_dim_(action_dim),
      posterior_(std::move(kernel), noise_variance, kPriorMean, context_dim + action_dim),
      schedule_(schedule) {
  if (context_dim < 0 || action_dim <= 0) {
    throw InvalidInput("borda estimate: need context_dim >= 0 and action_dim >= 1");
  }
  if (schedule_.mode == BetaMode::AnalyticLinear && schedule_.linear_dim == 0) {
    schedule_.linear_dim = context_dim + action_dim;
  }
  schedule_.validate();
}

Eigen::VectorXd BordaEstimate::joint(const Eigen::Ref<const Eigen::VectorXd>& context,
                                     const Eigen::Ref<const Eigen::VectorXd>& action) const {
  if (context.size() != context_dim_ || action.size() != action_dim_) {
    throw InvalidInput("borda estimate: context/action dimension mismatch");
  }
  Eigen::VectorXd z(context_dim_ + action_dim_);
  z << context, action;
  return z;
}

void BordaEstimate::ingest(const DuelObservation& obs) {
  if (!obs.opponent_uniform) {
    throw InvalidInput("duel observation: opponent was not drawn uniformly; Borda regression would be biased");
  }
  if (obs.outcome != 0 && obs.outcome != 1) {
    throw InvalidInput("duel observation: outcome must be 0 or 1");
  }
  check_box(obs.context, context_dim_, "context");
  check_box(obs.action, action_dim_, "action");
  check_box(obs.opponent, action_dim_, "opponent");

  const Eigen::VectorXd z = joint(obs.context, obs.action);
  const double var = posterior_.predict(z).variance();
  posterior_.append(z, static_cast<double>(obs.outcome));
  schedule_.accumulated_info_gain += 0.5 * std::log1p(var / posterior_.noise_variance());
  queried_variance_sum_ += var;
  ++rounds_seen_;
}

Prediction BordaEstimate::predict(const Eigen::Ref<const Eigen::VectorXd>& context,
                                  const Eigen::Ref<const Eigen::VectorXd>& action) const {
  return posterior_.predict(joint(context, action));
}

ConfidenceInterval BordaEstimate::confidence_bounds(const Eigen::Ref<const Eigen::VectorXd>& context,
                                                    const Eigen::Ref<const Eigen::VectorXd>& action) const {
  const Prediction p = predict(context, action);
  const double b = beta();
  return {p.mean - b * p.stddev, p.mean + b * p.stddev};
}

BordaEstimate ingest(BordaEstimate model, const DuelObservation& obs) {
  model.ingest(obs);
  return model;
}

ConfidenceInterval confidence_bounds(const BordaEstimate& model, const Eigen::Ref<const Eigen::VectorXd>& context,
                                     const Eigen::Ref<const Eigen::VectorXd>& action) {
  return model.confidence_bounds(context, action);
}

Eigen::MatrixXd joint_grid(const Eigen::Ref<const Eigen::MatrixXd>& contexts,
                           const Eigen::Ref<const Eigen::MatrixXd>& actions) {
  const Eigen::Index gx = contexts.rows();
  const Eigen::Index ga = actions.rows();
  Eigen::MatrixXd out(gx * ga, contexts.cols() + actions.cols());
  for (Eigen::Index i = 0; i < gx; ++i) {
    for (Eigen::Index j = 0; j < ga; ++j) {
      out.row(i * ga + j) << contexts.row(i), actions.row(j);
    }
  }
  return out;
}

BoundSurface bound_surface(const BordaEstimate& model, const Eigen::Ref<const Eigen::MatrixXd>& contexts,
                           const Eigen::Ref<const Eigen::MatrixXd>& actions) {
  BoundSurface s{Eigen::MatrixXd(contexts.rows(), actions.rows()), Eigen::MatrixXd(contexts.rows(), actions.rows())};
  for (Eigen::Index i = 0; i < contexts.rows(); ++i) {
    for (Eigen::Index j = 0; j < actions.rows(); ++j) {
      const ConfidenceInterval ci = model.confidence_bounds(contexts.row(i).transpose(), actions.row(j).transpose());
      s.lower(i, j) = ci.lower;
      s.upper(i, j) = ci.upper;
    }
  }
  return s;
}

SurfaceTracker::SurfaceTracker(const BordaEstimate& model, Eigen::MatrixXd contexts, Eigen::MatrixXd actions)
    : contexts_(std::move(contexts)),
      actions_(std::move(actions)),
      cache_(model.posterior(), joint_grid(contexts_, actions_)) {
  if (contexts_.cols() != model.context_dim() || actions_.cols() != model.action_dim()) {
    throw InvalidInput("surface tracker: grid dimensions do not match the model");
  }
}

void SurfaceTracker::sync(const BordaEstimate& model) { cache_.sync(model.posterior()); }

Eigen::MatrixXd SurfaceTracker::reshape(const Eigen::VectorXd& flat) const {
  return Eigen::Map<const Eigen::MatrixXd>(flat.data(), actions_.rows(), contexts_.rows()).transpose();
}

Eigen::MatrixXd SurfaceTracker::mean() const { return reshape(cache_.mean()); }

Eigen::MatrixXd SurfaceTracker::stddev() const { return reshape(cache_.stddev()); }

BoundSurface SurfaceTracker::bounds(double beta) const {
  const Eigen::VectorXd sd = cache_.stddev();
  const Eigen::VectorXd& mu = cache_.mean();
  return {reshape(mu - beta * sd), reshape(mu + beta * sd)};
}

}  // namespace borda
