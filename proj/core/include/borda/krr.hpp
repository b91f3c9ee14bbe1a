#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "borda/kernel.hpp"

namespace borda {

struct Prediction {
  double mean = 0.0;
  double stddev = 0.0;
  double variance() const { return stddev * stddev; }
};

/// Exact kernel ridge regression posterior over a growing dataset.
///
/// Keeps the lower Cholesky factor L of (K + jitter*I + noise_variance*I) and
/// the whitened residuals z = L^{-1}(y - prior_mean). Appending one point costs
/// O(t^2). Every `kRefactorInterval` appends the factor is rebuilt from scratch
/// and `factor_epoch()` advances.
class PosteriorState {
 public:
  static constexpr std::size_t kRefactorInterval = 256;

  PosteriorState(KernelSpec kernel, double noise_variance, double prior_mean, Eigen::Index input_dim);

  static PosteriorState fit(KernelSpec kernel, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                            const Eigen::Ref<const Eigen::VectorXd>& targets, double noise_variance,
                            double prior_mean);

  void append(const Eigen::Ref<const Eigen::VectorXd>& input, double target);

  Prediction predict(const Eigen::Ref<const Eigen::VectorXd>& query) const;

  /// 0.5 * log(1 + sigma^2(query) / noise_variance).
  double info_gain_increment(const Eigen::Ref<const Eigen::VectorXd>& query) const;

  Eigen::Index size() const { return n_; }
  bool empty() const { return n_ == 0; }
  Eigen::Index input_dim() const { return dim_; }
  const KernelSpec& kernel() const { return kernel_; }
  double noise_variance() const { return noise_variance_; }
  double prior_mean() const { return prior_mean_; }
  std::uint64_t factor_epoch() const { return epoch_; }

  auto inputs() const { return inputs_.topRows(n_); }
  auto input(Eigen::Index i) const { return inputs_.row(i); }
  /// y - prior_mean for every stored observation.
  auto residuals() const { return residuals_.head(n_); }
  auto whitened_residuals() const { return whitened_.head(n_); }
  auto tri_factor() const { return factor_.topLeftCorner(n_, n_); }
  double factor_entry(Eigen::Index row, Eigen::Index col) const { return factor_(row, col); }
  auto factor_row(Eigen::Index row) const { return factor_.row(row).head(row); }

  /// Solves (K + jitter*I + noise_variance*I) w = residuals.
  Eigen::VectorXd weights() const;

  /// Diagonal entry of the regularized Gram matrix at `x`.
  double regularized_diagonal(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  void reserve(Eigen::Index capacity);
  void refactorize();
  void check_query(Eigen::Index dim) const;

  KernelSpec kernel_;
  double noise_variance_;
  double prior_mean_;
  Eigen::Index dim_;
  Eigen::Index n_ = 0;
  std::size_t appends_since_refactor_ = 0;
  std::uint64_t epoch_ = 0;

  Eigen::MatrixXd inputs_;
  Eigen::VectorXd residuals_;
  Eigen::VectorXd whitened_;
  Eigen::MatrixXd factor_;
};

PosteriorState fit(KernelSpec kernel, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                   const Eigen::Ref<const Eigen::VectorXd>& targets, double noise_variance,
                   double prior_mean);

/// Successor state with one more observation. Pass an rvalue to reuse storage.
PosteriorState update(PosteriorState state, const Eigen::Ref<const Eigen::VectorXd>& input, double target);

Prediction predict(const PosteriorState& state, const Eigen::Ref<const Eigen::VectorXd>& query);

double info_gain_increment(const PosteriorState& state, const Eigen::Ref<const Eigen::VectorXd>& query);

/// Posterior mean and variance on a fixed query set, kept current in O(t*G)
/// per appended observation instead of O(t^2*G) per full re-evaluation.
class QueryCache {
 public:
  QueryCache(const PosteriorState& state, Eigen::MatrixXd queries);

  /// Folds in observations appended since the last sync; rebuilds from
  /// scratch if the state was refactorized in between.
  void sync(const PosteriorState& state);

  Eigen::Index size() const { return queries_.rows(); }
  const Eigen::MatrixXd& queries() const { return queries_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  Eigen::VectorXd variance() const { return variance_.cwiseMax(0.0); }
  Eigen::VectorXd stddev() const { return variance().cwiseSqrt(); }

 private:
  void rebuild(const PosteriorState& state);

  Eigen::MatrixXd queries_;
  Eigen::VectorXd prior_variance_;
  // Column i holds L^{-1} k(X, q) entry i for every query q.
  Eigen::MatrixXd projections_;
  Eigen::VectorXd mean_;
  Eigen::VectorXd variance_;
  Eigen::Index rows_ = 0;
  std::uint64_t epoch_ = 0;
};

}  // namespace borda
