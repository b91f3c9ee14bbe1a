#include "borda/policy.hpp"

#include <algorithm>
#include <limits>

#include "borda/errors.hpp"

namespace borda {

LowerEnvelope::LowerEnvelope(Eigen::Index num_contexts, Eigen::Index num_actions)
    : values_(Eigen::MatrixXd::Constant(num_contexts, num_actions, -std::numeric_limits<double>::infinity())) {
  if (num_contexts < 1 || num_actions < 1) throw InvalidInput("lower envelope: empty grid");
}

LowerEnvelope::LowerEnvelope(const CandidateGrids& grids) : LowerEnvelope(grids.num_contexts(), grids.num_actions()) {}

void LowerEnvelope::absorb(const Eigen::Ref<const Eigen::MatrixXd>& lower) {
  if (lower.rows() != values_.rows() || lower.cols() != values_.cols()) {
    throw InvalidInput("lower envelope: surface shape does not match the envelope grid");
  }
  values_ = values_.cwiseMax(lower);
  ++rounds_absorbed_;
}

LowerEnvelope absorb_round(LowerEnvelope env, const BordaEstimate& model, const CandidateGrids& grids) {
  if (grids.num_contexts() != env.values().rows() || grids.num_actions() != env.values().cols()) {
    throw InvalidInput("absorb_round: grids do not match the envelope");
  }
  env.absorb(bound_surface(model, grids.contexts, grids.actions));
  return env;
}

PolicyTable extract_policy(const LowerEnvelope& env) {
  if (env.rounds_absorbed() == 0) throw InvalidInput("extract_policy: envelope has never absorbed a round");
  const Eigen::MatrixXd& v = env.values();
  PolicyTable table;
  table.action_index.resize(static_cast<std::size_t>(v.rows()));
  table.value.resize(v.rows());
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    const Eigen::Index best = argmax_lowest(v.row(i).transpose());
    table.action_index[static_cast<std::size_t>(i)] = best;
    table.value(i) = v(i, best);
  }
  return table;
}

double median(Eigen::VectorXd values) {
  if (values.size() == 0) throw InvalidInput("median of an empty vector");
  std::sort(values.data(), values.data() + values.size());
  const Eigen::Index n = values.size();
  return n % 2 == 1 ? values(n / 2) : 0.5 * (values(n / 2 - 1) + values(n / 2));
}

RegretProfile regret_profile(const PolicyTable& policy, const Eigen::Ref<const Eigen::MatrixXd>& rewards) {
  if (static_cast<Eigen::Index>(policy.action_index.size()) != rewards.rows()) {
    throw InvalidInput("regret_profile: policy covers a different number of contexts than the reward grid");
  }
  RegretProfile out;
  out.per_context.resize(rewards.rows());
  for (Eigen::Index i = 0; i < rewards.rows(); ++i) {
    const Eigen::Index a = policy.action_index[static_cast<std::size_t>(i)];
    if (a < 0 || a >= rewards.cols()) throw InvalidInput("regret_profile: policy action index out of range");
    out.per_context(i) = rewards.row(i).maxCoeff() - rewards(i, a);
  }
  out.worst_context = argmax_lowest(out.per_context);
  out.max_regret = out.per_context(out.worst_context);
  out.median_regret = median(out.per_context);
  return out;
}

RegretProfile regret_profile(const PolicyTable& policy, const SyntheticEnv& env, const CandidateGrids& grids) {
  if (grids.contexts.cols() != env.context_dim() || grids.actions.cols() != env.action_dim()) {
    throw InvalidInput("regret_profile: grids do not match the environment");
  }
  return regret_profile(policy, reward_surface(env, grids.contexts, grids.actions));
}

}  // namespace borda
