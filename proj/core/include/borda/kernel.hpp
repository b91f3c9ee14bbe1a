#pragma once

#include <string>
#include <string_view>

#include <Eigen/Core>

namespace borda {

enum class KernelFamily { SquaredExponential, Matern52, Linear };

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

/// Positive semi-definite kernel with one lengthscale per input coordinate.
///
/// The linear family is sv * sum_i u_i v_i / l_i^2. `jitter` only enters on
/// the Gram diagonal, never in eval_kernel.
struct KernelSpec {
  KernelFamily family = KernelFamily::SquaredExponential;
  Eigen::VectorXd lengthscales;
  double signal_variance = 1.0;
  double jitter = 1e-6;

  /// Isotropic spec with the default jitter of 1e-6 * signal_variance.
  static KernelSpec isotropic(KernelFamily family, Eigen::Index dim, double lengthscale,
                              double signal_variance = 1.0);

  Eigen::Index dim() const { return lengthscales.size(); }
  bool stationary() const { return family != KernelFamily::Linear; }

  /// Throws InvalidInput unless lengthscales > 0, signal_variance > 0,
  /// jitter >= 0 and (when dim >= 0) the lengthscale count equals dim.
  void validate(Eigen::Index expected_dim = -1) const;
};

double eval_kernel(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& u,
                   const Eigen::Ref<const Eigen::VectorXd>& v);

/// Points are stored one per row. Result is symmetric with jitter on the diagonal.
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& points);

/// Plain cross-covariance K(a_i, b_j) between two row-wise point sets (no jitter).
Eigen::MatrixXd cross_kernel(const KernelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& a,
                             const Eigen::Ref<const Eigen::MatrixXd>& b);

/// Vector of K(x, b_j) for one point against a row-wise point set.
Eigen::VectorXd kernel_column(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                              const Eigen::Ref<const Eigen::MatrixXd>& points);

}  // namespace borda
