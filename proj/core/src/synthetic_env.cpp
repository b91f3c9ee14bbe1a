#include "borda/synthetic_env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "borda/errors.hpp"

namespace borda {

std::string_view to_string(LinkFunction link) {
  switch (link) {
    case LinkFunction::Logistic:
      return "logistic";
    case LinkFunction::GaussianCdf:
      return "gaussian-cdf";
  }
  return "unknown";
}

LinkFunction parse_link(std::string_view name) {
  if (name == "logistic" || name == "bradley-terry") return LinkFunction::Logistic;
  if (name == "gaussian-cdf" || name == "thurstone") return LinkFunction::GaussianCdf;
  throw InvalidInput("unknown link function '" + std::string(name) + "'");
}

double link_probability(LinkFunction link, double gap) {
  double p = 0.5;
  switch (link) {
    case LinkFunction::Logistic:
      p = 1.0 / (1.0 + std::exp(-gap));
      break;
    case LinkFunction::GaussianCdf:
      p = 0.5 * std::erfc(-gap / std::numbers::sqrt2);
      break;
  }
  return std::clamp(p, kMinDuelProbability, 1.0 - kMinDuelProbability);
}

double RFFReward::operator()(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  if (z.size() != input_dim()) {
    throw InvalidInput("rff reward: input dimension " + std::to_string(z.size()) + ", expected " +
                       std::to_string(input_dim()));
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < num_features(); ++i) {
    acc += coefficients(i) * std::cos(frequencies.row(i).dot(z) + phases(i));
  }
  return amplitude * acc;
}

double RFFReward::magnitude_bound() const { return amplitude * coefficients.cwiseAbs().sum(); }

RFFReward sample_rff(Eigen::Index input_dim, Eigen::Index num_features, double lengthscale, Rng& rng) {
  if (num_features < 1) throw InvalidInput("rff reward: need at least one feature");
  if (!(lengthscale > 0.0)) throw InvalidInput("rff reward: lengthscale must be positive");
  if (input_dim < 1) throw InvalidInput("rff reward: input dimension must be positive");
  std::normal_distribution<double> freq(0.0, 1.0 / lengthscale);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> weight(0.0, 1.0);
  RFFReward r;
  r.frequencies.resize(num_features, input_dim);
  r.phases.resize(num_features);
  r.coefficients.resize(num_features);
  for (Eigen::Index i = 0; i < num_features; ++i) {
    for (Eigen::Index d = 0; d < input_dim; ++d) r.frequencies(i, d) = freq(rng);
  }
  for (Eigen::Index i = 0; i < num_features; ++i) r.phases(i) = phase(rng);
  for (Eigen::Index i = 0; i < num_features; ++i) r.coefficients(i) = weight(rng);
  r.amplitude = std::sqrt(2.0 / static_cast<double>(num_features));
  return r;
}

void EnvSpec::validate() const {
  if (context_dim < 0) throw InvalidInput("env: context dimension must be >= 0");
  if (action_dim < 1) throw InvalidInput("env: action dimension must be >= 1");
  if (num_features < 1) throw InvalidInput("env: need at least one random feature");
  if (!(lengthscale > 0.0)) throw InvalidInput("env: lengthscale must be positive");
}

SyntheticEnv::SyntheticEnv(EnvSpec spec, RFFReward reward) : spec_(spec), reward_(std::move(reward)) {
  spec_.validate();
  if (reward_.input_dim() != spec_.context_dim + spec_.action_dim) {
    throw InvalidInput("env: reward input dimension does not match context + action dimensions");
  }
}

SyntheticEnv sample_env(const EnvSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  return SyntheticEnv(spec, sample_rff(spec.context_dim + spec.action_dim, spec.num_features, spec.lengthscale, rng));
}

void SyntheticEnv::check_domain(const Eigen::Ref<const Eigen::VectorXd>& context,
                                const Eigen::Ref<const Eigen::VectorXd>& action) const {
  if (context.size() != spec_.context_dim || action.size() != spec_.action_dim) {
    throw InvalidInput("env: context/action dimension mismatch");
  }
  const auto in_box = [](const auto& v) { return ((v.array() >= 0.0) && (v.array() <= 1.0)).all(); };
  if (!in_box(context) || !in_box(action)) {
    throw InvalidInput("env: point lies outside the unit box");
  }
}

double SyntheticEnv::reward(const Eigen::Ref<const Eigen::VectorXd>& context,
                            const Eigen::Ref<const Eigen::VectorXd>& action) const {
  check_domain(context, action);
  Eigen::VectorXd z(context.size() + action.size());
  z << context, action;
  return reward_(z);
}

double SyntheticEnv::duel_prob(const Eigen::Ref<const Eigen::VectorXd>& context,
                               const Eigen::Ref<const Eigen::VectorXd>& action,
                               const Eigen::Ref<const Eigen::VectorXd>& opponent) const {
  return link_probability(spec_.link, reward(context, action) - reward(context, opponent));
}

int SyntheticEnv::duel_outcome(const Eigen::Ref<const Eigen::VectorXd>& context,
                               const Eigen::Ref<const Eigen::VectorXd>& action,
                               const Eigen::Ref<const Eigen::VectorXd>& opponent, Rng& rng) const {
  const double p = duel_prob(context, action, opponent);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng) < p ? 1 : 0;
}

double SyntheticEnv::true_borda(const Eigen::Ref<const Eigen::VectorXd>& context,
                                const Eigen::Ref<const Eigen::VectorXd>& action,
                                const Eigen::Ref<const Eigen::MatrixXd>& action_grid) const {
  if (action_grid.rows() == 0) throw InvalidInput("true_borda: empty action grid");
  const double r = reward(context, action);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < action_grid.rows(); ++k) {
    acc += link_probability(spec_.link, r - reward(context, action_grid.row(k).transpose()));
  }
  return acc / static_cast<double>(action_grid.rows());
}

double SyntheticEnv::monte_carlo_borda(const Eigen::Ref<const Eigen::VectorXd>& context,
                                       const Eigen::Ref<const Eigen::VectorXd>& action, int samples,
                                       Rng& rng) const {
  if (samples < 1) throw InvalidInput("monte_carlo_borda: need at least one sample");
  const double r = reward(context, action);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd opponent(spec_.action_dim);
  double acc = 0.0;
  for (int s = 0; s < samples; ++s) {
    for (Eigen::Index d = 0; d < opponent.size(); ++d) opponent(d) = u(rng);
    acc += link_probability(spec_.link, r - reward(context, opponent));
  }
  return acc / samples;
}

Eigen::MatrixXd reward_surface(const SyntheticEnv& env, const Eigen::Ref<const Eigen::MatrixXd>& contexts,
                               const Eigen::Ref<const Eigen::MatrixXd>& actions) {
  Eigen::MatrixXd out(contexts.rows(), actions.rows());
  for (Eigen::Index i = 0; i < contexts.rows(); ++i) {
    for (Eigen::Index j = 0; j < actions.rows(); ++j) {
      out(i, j) = env.reward(contexts.row(i).transpose(), actions.row(j).transpose());
    }
  }
  return out;
}

Eigen::MatrixXd borda_surface(const SyntheticEnv& env, const Eigen::Ref<const Eigen::MatrixXd>& contexts,
                              const Eigen::Ref<const Eigen::MatrixXd>& actions) {
  if (actions.rows() == 0) throw InvalidInput("borda_surface: empty action grid");
  const Eigen::MatrixXd rewards = reward_surface(env, contexts, actions);
  const LinkFunction link = env.spec().link;
  Eigen::MatrixXd out(contexts.rows(), actions.rows());
  for (Eigen::Index i = 0; i < contexts.rows(); ++i) {
    for (Eigen::Index j = 0; j < actions.rows(); ++j) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < actions.rows(); ++k) {
        acc += link_probability(link, rewards(i, j) - rewards(i, k));
      }
      out(i, j) = acc / static_cast<double>(actions.rows());
    }
  }
  return out;
}

Eigen::VectorXd borda_against(const SyntheticEnv& env, const Eigen::Ref<const Eigen::MatrixXd>& points,
                              const Eigen::Ref<const Eigen::MatrixXd>& opponents) {
  const Eigen::Index dx = env.context_dim();
  const Eigen::Index da = env.action_dim();
  if (points.cols() != dx + da || opponents.cols() != da) {
    throw InvalidInput("borda_against: dimension mismatch");
  }
  if (opponents.rows() == 0) throw InvalidInput("borda_against: empty opponent set");
  if (!((points.array() >= 0.0) && (points.array() <= 1.0)).all() ||
      !((opponents.array() >= 0.0) && (opponents.array() <= 1.0)).all()) {
    throw InvalidInput("borda_against: point lies outside the unit box");
  }
  const RFFReward& r = env.reward_function();
  const Eigen::MatrixXd omega_x = r.frequencies.leftCols(dx);
  const Eigen::MatrixXd omega_a = r.frequencies.rightCols(da);

  // r(x, a') = amp * sum_k w_k cos(alpha_k(x) + beta_k(a')), expanded with the
  // angle-addition identity so the cross terms become two matrix products.
  const Eigen::MatrixXd beta = (omega_a * opponents.transpose()).colwise() + r.phases;  // m x M
  const Eigen::MatrixXd alpha = points.leftCols(dx) * omega_x.transpose();              // n x m
  const Eigen::MatrixXd wc = alpha.array().cos().rowwise() * r.coefficients.transpose().array();
  const Eigen::MatrixXd ws = alpha.array().sin().rowwise() * r.coefficients.transpose().array();
  const Eigen::MatrixXd opp = r.amplitude * (wc * beta.array().cos().matrix() - ws * beta.array().sin().matrix());

  const LinkFunction link = env.spec().link;
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double own = r(points.row(i).transpose());
    double acc = 0.0;
    for (Eigen::Index j = 0; j < opponents.rows(); ++j) acc += link_probability(link, own - opp(i, j));
    out(i) = acc / static_cast<double>(opponents.rows());
  }
  return out;
}

}  // namespace borda
