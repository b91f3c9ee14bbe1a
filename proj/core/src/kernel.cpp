#include "borda/kernel.hpp"

#include <cmath>
#include <string>

#include "borda/errors.hpp"

namespace borda {
namespace {

constexpr double kSqrt5 = 2.23606797749978969640917366873;

// Kernel value as a function of the squared scaled distance (stationary) or
// the scaled inner product (linear).
inline double profile(KernelFamily family, double sv, double sq_dist) {
  switch (family) {
    case KernelFamily::SquaredExponential:
      return sv * std::exp(-0.5 * sq_dist);
    case KernelFamily::Matern52: {
      const double r = std::sqrt(sq_dist);
      return sv * (1.0 + kSqrt5 * r + (5.0 / 3.0) * sq_dist) * std::exp(-kSqrt5 * r);
    }
    case KernelFamily::Linear:
      break;
  }
  return 0.0;
}

void check_dim(const KernelSpec& spec, Eigen::Index dim) {
  if (dim != spec.dim()) {
    throw InvalidInput("kernel: point dimension " + std::to_string(dim) +
                       " does not match lengthscale count " + std::to_string(spec.dim()));
  }
}

// Rows divided by the per-coordinate lengthscales (squared lengthscales for
// the linear family, applied to one side only).
Eigen::MatrixXd scaled(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& points) {
  return points * spec.lengthscales.cwiseInverse().asDiagonal();
}

}  // namespace

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::SquaredExponential:
      return "se";
    case KernelFamily::Matern52:
      return "matern52";
    case KernelFamily::Linear:
      return "linear";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "se" || name == "squared-exponential") return KernelFamily::SquaredExponential;
  if (name == "matern52" || name == "matern-5/2") return KernelFamily::Matern52;
  if (name == "linear") return KernelFamily::Linear;
  throw InvalidInput("unknown kernel family '" + std::string(name) + "'");
}

KernelSpec KernelSpec::isotropic(KernelFamily family, Eigen::Index dim, double lengthscale,
                                 double signal_variance) {
  KernelSpec spec;
  spec.family = family;
  spec.lengthscales = Eigen::VectorXd::Constant(dim, lengthscale);
  spec.signal_variance = signal_variance;
  spec.jitter = 1e-6 * signal_variance;
  spec.validate();
  return spec;
}

void KernelSpec::validate(Eigen::Index expected_dim) const {
  if (expected_dim >= 0 && lengthscales.size() != expected_dim) {
    throw InvalidInput("kernel: expected " + std::to_string(expected_dim) + " lengthscales, got " +
                       std::to_string(lengthscales.size()));
  }
  if (lengthscales.size() > 0 && !(lengthscales.array() > 0.0).all()) {
    throw InvalidInput("kernel: lengthscales must be positive");
  }
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
    throw InvalidInput("kernel: signal_variance must be positive");
  }
  if (!(jitter >= 0.0) || !std::isfinite(jitter)) {
    throw InvalidInput("kernel: jitter must be nonnegative");
  }
}

double eval_kernel(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& u,
                   const Eigen::Ref<const Eigen::VectorXd>& v) {
  check_dim(spec, u.size());
  check_dim(spec, v.size());
  if (spec.family == KernelFamily::Linear) {
    return spec.signal_variance * (u.array() * v.array() / spec.lengthscales.array().square()).sum();
  }
  const double sq = ((u - v).array() / spec.lengthscales.array()).square().sum();
  return profile(spec.family, spec.signal_variance, sq);
}

Eigen::MatrixXd cross_kernel(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& a,
                             const Eigen::Ref<const Eigen::MatrixXd>& b) {
  check_dim(spec, a.cols());
  check_dim(spec, b.cols());
  const Eigen::MatrixXd sa = scaled(spec, a);
  const Eigen::MatrixXd sb = scaled(spec, b);
  if (spec.family == KernelFamily::Linear) {
    return spec.signal_variance * (sa * sb.transpose());
  }
  Eigen::MatrixXd out(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double sq = (sa.row(i) - sb.row(j)).squaredNorm();
      out(i, j) = profile(spec.family, spec.signal_variance, sq);
    }
  }
  return out;
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& points) {
  check_dim(spec, points.cols());
  if (points.rows() == 0) {
    throw InvalidInput("gram_matrix: empty point list");
  }
  const Eigen::Index n = points.rows();
  const Eigen::MatrixXd s = scaled(spec, points);
  Eigen::MatrixXd gram(n, n);
  if (spec.family == KernelFamily::Linear) {
    gram = spec.signal_variance * (s * s.transpose());
    gram = gram.selfadjointView<Eigen::Lower>();
  } else {
    for (Eigen::Index j = 0; j < n; ++j) {
      gram(j, j) = spec.signal_variance;
      for (Eigen::Index i = j + 1; i < n; ++i) {
        const double value = profile(spec.family, spec.signal_variance, (s.row(i) - s.row(j)).squaredNorm());
        gram(i, j) = value;
        gram(j, i) = value;
      }
    }
  }
  gram.diagonal().array() += spec.jitter;
  return gram;
}

Eigen::VectorXd kernel_column(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                              const Eigen::Ref<const Eigen::MatrixXd>& points) {
  check_dim(spec, x.size());
  check_dim(spec, points.cols());
  Eigen::VectorXd out(points.rows());
  if (spec.family == KernelFamily::Linear) {
    const Eigen::VectorXd w = x.array() / spec.lengthscales.array().square();
    out = spec.signal_variance * (points * w);
    return out;
  }
  const Eigen::VectorXd inv = spec.lengthscales.cwiseInverse();
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double sq = ((points.row(i).transpose() - x).cwiseProduct(inv)).squaredNorm();
    out(i) = profile(spec.family, spec.signal_variance, sq);
  }
  return out;
}

}  // namespace borda
