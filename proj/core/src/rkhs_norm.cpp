#include "borda/rkhs_norm.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "borda/errors.hpp"
#include "borda/parallel.hpp"
#include "borda/random.hpp"

namespace borda {
namespace {

Eigen::MatrixXd uniform_points(Eigen::Index n, Eigen::Index dim, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd pts(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index d = 0; d < dim; ++d) pts(i, d) = u(rng);
  }
  return pts;
}

}  // namespace

std::string_view to_string(NormTarget target) { return target == NormTarget::Reward ? "reward" : "borda"; }

double rkhs_norm_on_points(const KernelSpec& kernel, const Eigen::Ref<const Eigen::MatrixXd>& points,
                           const Eigen::Ref<const Eigen::VectorXd>& values, double reg) {
  if (points.rows() < 2) throw InvalidInput("rkhs norm: need at least two sample points");
  if (points.rows() != values.size()) throw InvalidInput("rkhs norm: point/value count mismatch");
  if (!(reg > 0.0)) throw InvalidInput("rkhs norm: regularization must be positive");
  KernelSpec plain = kernel;
  plain.jitter = 0.0;
  const Eigen::MatrixXd gram = gram_matrix(plain, points);
  Eigen::MatrixXd shifted = gram;
  shifted.diagonal().array() += reg;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("rkhs norm: Cholesky factorization failed for regularized kernel matrix of size " +
                         std::to_string(points.rows()));
  }
  const Eigen::VectorXd alpha = llt.solve(values);
  const double quad = alpha.dot(gram * alpha);
  if (!std::isfinite(quad)) throw NumericalError("rkhs norm: non-finite quadratic form");
  return std::sqrt(std::max(quad, 0.0));
}

NormEstimate estimate_norm(const EvaluableFunction& f, Eigen::Index context_dim, Eigen::Index action_dim,
                           Eigen::Index n, const KernelSpec& kernel, double reg, std::uint64_t seed,
                           NormTarget target) {
  const Eigen::Index dim = context_dim + action_dim;
  if (n < 2) throw InvalidInput("estimate_norm: need n >= 2");
  kernel.validate(dim);
  Rng rng(seed);
  const Eigen::MatrixXd pts = uniform_points(n, dim, rng);
  Eigen::VectorXd values(n);
  for (Eigen::Index i = 0; i < n; ++i) values(i) = f(pts.row(i).transpose());
  return NormEstimate{target, context_dim, action_dim, n, reg, rkhs_norm_on_points(kernel, pts, values, reg)};
}

std::pair<NormEstimate, NormEstimate> norm_pair(const SyntheticEnv& env, int mc_samples, std::uint64_t seed,
                                                const NormStudyOptions& options) {
  if (mc_samples < 1) throw InvalidInput("norm_pair: need at least one Monte-Carlo opponent");
  const Eigen::Index dx = env.context_dim();
  const Eigen::Index da = env.action_dim();
  const Eigen::Index n = options.sample_points;
  if (n < 2) throw InvalidInput("norm_pair: need at least two sample points");
  const double ell = options.kernel_lengthscale > 0.0 ? options.kernel_lengthscale : env.spec().lengthscale;
  const KernelSpec kernel = KernelSpec::isotropic(KernelFamily::SquaredExponential, dx + da, ell);

  Rng rng(seed);
  const Eigen::MatrixXd pts = uniform_points(n, dx + da, rng);
  Eigen::VectorXd reward_values(n);
  for (Eigen::Index i = 0; i < n; ++i) reward_values(i) = env.reward_function()(pts.row(i).transpose());
  Eigen::VectorXd borda_values(n);
  if (options.shared_opponents) {
    borda_values = borda_against(env, pts, uniform_points(mc_samples, da, rng));
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      borda_values(i) = env.monte_carlo_borda(pts.row(i).head(dx).transpose(), pts.row(i).tail(da).transpose(),
                                              mc_samples, rng);
    }
  }

  const double reg = options.regularization;
  return {NormEstimate{NormTarget::Reward, dx, da, n, reg, rkhs_norm_on_points(kernel, pts, reward_values, reg)},
          NormEstimate{NormTarget::Borda, dx, da, n, reg, rkhs_norm_on_points(kernel, pts, borda_values, reg)}};
}

NormComparison compare_norms(Eigen::Index context_dim, Eigen::Index action_dim, int trials, int mc_samples,
                             std::uint64_t seed, const NormStudyOptions& options) {
  if (trials < 1) throw InvalidInput("compare_norms: need at least one trial");
  NormComparison out;
  out.context_dim = context_dim;
  out.action_dim = action_dim;
  out.trials = trials;

  struct Slot {
    bool ok = false;
    double reward = 0.0;
    double borda = 0.0;
    std::uint64_t seed = 0;
    std::string error;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(trials));
  parallel_for(slots.size(), options.workers, [&](std::size_t k) {
    Slot& slot = slots[k];
    slot.seed = derive_seed(seed, k);
    try {
      EnvSpec spec{context_dim, action_dim, options.num_features, options.lengthscale, options.link, slot.seed};
      const SyntheticEnv env = sample_env(spec);
      const auto [reward, borda] = norm_pair(env, mc_samples, derive_seed(slot.seed, 1), options);
      slot.reward = reward.norm_value;
      slot.borda = borda.norm_value;
      slot.ok = true;
    } catch (const NumericalError& e) {
      slot.error = e.what();
    }
  });

  double wins = 0.0;
  double margin = 0.0;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const Slot& slot = slots[k];
    if (!slot.ok) {
      out.failures.push_back({static_cast<int>(k), slot.seed, slot.error});
      continue;
    }
    out.reward_norms.push_back(slot.reward);
    out.borda_norms.push_back(slot.borda);
    wins += slot.borda < slot.reward ? 1.0 : 0.0;
    margin += slot.reward - slot.borda;
  }
  out.completed = static_cast<int>(out.reward_norms.size());
  if (out.completed > 0) {
    out.win_rate = wins / out.completed;
    out.win_margin = margin / out.completed;
  }
  return out;
}

}  // namespace borda
