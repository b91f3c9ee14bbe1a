#include "borda/krr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "borda/errors.hpp"

namespace borda {

PosteriorState::PosteriorState(KernelSpec kernel, double noise_variance, double prior_mean,
                               Eigen::Index input_dim)
    : kernel_(std::move(kernel)), noise_variance_(noise_variance), prior_mean_(prior_mean), dim_(input_dim) {
  kernel_.validate(input_dim);
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
    throw InvalidInput("krr: noise variance must be positive");
  }
  if (!std::isfinite(prior_mean)) {
    throw InvalidInput("krr: prior mean must be finite");
  }
  inputs_.resize(0, dim_);
}

PosteriorState PosteriorState::fit(KernelSpec kernel, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                                   const Eigen::Ref<const Eigen::VectorXd>& targets, double noise_variance,
                                   double prior_mean) {
  if (inputs.rows() != targets.size()) {
    throw InvalidInput("krr fit: " + std::to_string(inputs.rows()) + " inputs but " +
                       std::to_string(targets.size()) + " targets");
  }
  const Eigen::Index dim = inputs.rows() > 0 ? inputs.cols() : kernel.dim();
  PosteriorState state(std::move(kernel), noise_variance, prior_mean, dim);
  if (inputs.rows() == 0) {
    return state;
  }
  if (inputs.cols() != state.dim_) {
    throw InvalidInput("krr fit: input dimension does not match kernel");
  }
  state.reserve(inputs.rows());
  state.n_ = inputs.rows();
  state.inputs_.topRows(state.n_) = inputs;
  state.residuals_.head(state.n_) = targets.array() - prior_mean;
  state.refactorize();
  state.epoch_ = 0;
  return state;
}

void PosteriorState::reserve(Eigen::Index capacity) {
  if (capacity <= inputs_.rows()) {
    return;
  }
  const Eigen::Index cap = std::max<Eigen::Index>({capacity, 2 * inputs_.rows(), 16});
  Eigen::MatrixXd inputs(cap, dim_);
  Eigen::VectorXd residuals(cap);
  Eigen::VectorXd whitened(cap);
  Eigen::MatrixXd factor = Eigen::MatrixXd::Zero(cap, cap);
  inputs.topRows(n_) = inputs_.topRows(n_);
  residuals.head(n_) = residuals_.head(n_);
  whitened.head(n_) = whitened_.head(n_);
  factor.topLeftCorner(n_, n_) = factor_.topLeftCorner(n_, n_);
  inputs_.swap(inputs);
  residuals_.swap(residuals);
  whitened_.swap(whitened);
  factor_.swap(factor);
}

void PosteriorState::refactorize() {
  Eigen::MatrixXd gram = gram_matrix(kernel_, inputs_.topRows(n_));
  gram.diagonal().array() += noise_variance_;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("krr: Cholesky factorization failed for Gram matrix of size " + std::to_string(n_));
  }
  factor_.topLeftCorner(n_, n_) = llt.matrixL();
  whitened_.head(n_) = factor_.topLeftCorner(n_, n_).triangularView<Eigen::Lower>().solve(residuals_.head(n_));
  appends_since_refactor_ = 0;
  ++epoch_;
}

void PosteriorState::check_query(Eigen::Index dim) const {
  if (dim != dim_) {
    throw InvalidInput("krr: query dimension " + std::to_string(dim) + " does not match " + std::to_string(dim_));
  }
}

double PosteriorState::regularized_diagonal(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return eval_kernel(kernel_, x, x) + kernel_.jitter + noise_variance_;
}

void PosteriorState::append(const Eigen::Ref<const Eigen::VectorXd>& input, double target) {
  check_query(input.size());
  if (!std::isfinite(target)) {
    throw InvalidInput("krr: target must be finite");
  }
  reserve(n_ + 1);
  const Eigen::Index t = n_;
  Eigen::VectorXd cross = kernel_column(kernel_, input, inputs_.topRows(t));
  Eigen::VectorXd proj = factor_.topLeftCorner(t, t).triangularView<Eigen::Lower>().solve(cross);
  const double pivot_sq = regularized_diagonal(input) - proj.squaredNorm();
  if (!(pivot_sq > 0.0)) {
    throw NumericalError("krr: rank-one extension lost positive definiteness at Gram size " + std::to_string(t + 1));
  }
  const double pivot = std::sqrt(pivot_sq);
  inputs_.row(t) = input.transpose();
  residuals_(t) = target - prior_mean_;
  factor_.row(t).head(t) = proj.transpose();
  factor_(t, t) = pivot;
  whitened_(t) = (residuals_(t) - proj.dot(whitened_.head(t))) / pivot;
  n_ = t + 1;
  if (++appends_since_refactor_ >= kRefactorInterval) {
    refactorize();
  }
}

Prediction PosteriorState::predict(const Eigen::Ref<const Eigen::VectorXd>& query) const {
  check_query(query.size());
  const double prior_var = eval_kernel(kernel_, query, query);
  if (n_ == 0) {
    return {prior_mean_, std::sqrt(std::max(prior_var, 0.0))};
  }
  Eigen::VectorXd cross = kernel_column(kernel_, query, inputs_.topRows(n_));
  Eigen::VectorXd proj = factor_.topLeftCorner(n_, n_).triangularView<Eigen::Lower>().solve(cross);
  const double mean = prior_mean_ + proj.dot(whitened_.head(n_));
  const double var = std::clamp(prior_var - proj.squaredNorm(), 0.0, std::max(prior_var, 0.0));
  return {mean, std::sqrt(var)};
}

double PosteriorState::info_gain_increment(const Eigen::Ref<const Eigen::VectorXd>& query) const {
  const Prediction p = predict(query);
  return 0.5 * std::log1p(p.variance() / noise_variance_);
}

Eigen::VectorXd PosteriorState::weights() const {
  if (n_ == 0) {
    return {};
  }
  return factor_.topLeftCorner(n_, n_).triangularView<Eigen::Lower>().transpose().solve(whitened_.head(n_));
}

PosteriorState fit(KernelSpec kernel, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                   const Eigen::Ref<const Eigen::VectorXd>& targets, double noise_variance, double prior_mean) {
  return PosteriorState::fit(std::move(kernel), inputs, targets, noise_variance, prior_mean);
}

PosteriorState update(PosteriorState state, const Eigen::Ref<const Eigen::VectorXd>& input, double target) {
  state.append(input, target);
  return state;
}

Prediction predict(const PosteriorState& state, const Eigen::Ref<const Eigen::VectorXd>& query) {
  return state.predict(query);
}

double info_gain_increment(const PosteriorState& state, const Eigen::Ref<const Eigen::VectorXd>& query) {
  return state.info_gain_increment(query);
}

QueryCache::QueryCache(const PosteriorState& state, Eigen::MatrixXd queries) : queries_(std::move(queries)) {
  if (queries_.cols() != state.input_dim()) {
    throw InvalidInput("query cache: query dimension does not match posterior");
  }
  prior_variance_.resize(queries_.rows());
  for (Eigen::Index q = 0; q < queries_.rows(); ++q) {
    prior_variance_(q) = eval_kernel(state.kernel(), queries_.row(q).transpose(), queries_.row(q).transpose());
  }
  rebuild(state);
}

void QueryCache::rebuild(const PosteriorState& state) {
  const Eigen::Index n = state.size();
  const Eigen::Index g = queries_.rows();
  projections_.resize(g, std::max<Eigen::Index>(n, 16));
  mean_ = Eigen::VectorXd::Constant(g, state.prior_mean());
  variance_ = prior_variance_;
  if (n > 0) {
    const Eigen::MatrixXd cross = cross_kernel(state.kernel(), state.inputs(), queries_);
    const Eigen::MatrixXd proj = state.tri_factor().triangularView<Eigen::Lower>().solve(cross);
    projections_.leftCols(n) = proj.transpose();
    mean_ += proj.transpose() * state.whitened_residuals();
    variance_ -= proj.colwise().squaredNorm().transpose();
  }
  rows_ = n;
  epoch_ = state.factor_epoch();
}

void QueryCache::sync(const PosteriorState& state) {
  if (state.factor_epoch() != epoch_ || state.size() < rows_) {
    rebuild(state);
    return;
  }
  const Eigen::Index n = state.size();
  if (n > projections_.cols()) {
    Eigen::MatrixXd grown(projections_.rows(), std::max(n, 2 * projections_.cols()));
    grown.leftCols(rows_) = projections_.leftCols(rows_);
    projections_.swap(grown);
  }
  for (Eigen::Index i = rows_; i < n; ++i) {
    Eigen::VectorXd column = kernel_column(state.kernel(), state.input(i).transpose(), queries_);
    if (i > 0) {
      column.noalias() -= projections_.leftCols(i) * state.factor_row(i).transpose();
    }
    column /= state.factor_entry(i, i);
    projections_.col(i) = column;
    mean_ += state.whitened_residuals()(i) * column;
    variance_ -= column.cwiseAbs2();
  }
  rows_ = n;
}

}  // namespace borda
