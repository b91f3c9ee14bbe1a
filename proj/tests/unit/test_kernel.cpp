#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "borda/errors.hpp"
#include "borda/kernel.hpp"
#include "oracles.hpp"

using namespace borda;

TEST_SUITE("kernel") {

TEST_CASE("se kernel at zero distance is the signal variance") {
  const KernelSpec k = KernelSpec::isotropic(KernelFamily::SquaredExponential, 3, 0.4, 2.5);
  const Eigen::Vector3d x(0.1, 0.7, 0.3);
  CHECK(eval_kernel(k, x, x) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("se kernel closed form at unit distance") {
  const KernelSpec k = KernelSpec::isotropic(KernelFamily::SquaredExponential, 2, 1.0, 1.0);
  const Eigen::Vector2d u(0.0, 0.0);
  const Eigen::Vector2d v(0.6, 0.8);
  CHECK(eval_kernel(k, u, v) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(eval_kernel(k, u, v) == doctest::Approx(0.60653).epsilon(1e-5));
}

TEST_CASE("linear kernel is a dot product") {
  const KernelSpec k = KernelSpec::isotropic(KernelFamily::Linear, 2, 1.0, 1.0);
  CHECK(eval_kernel(k, Eigen::Vector2d(1, 2), Eigen::Vector2d(3, 4)) == 11.0);
}

TEST_CASE("matern52 matches its closed form") {
  const double ls = 0.5;
  const KernelSpec k = KernelSpec::isotropic(KernelFamily::Matern52, 1, ls, 1.3);
  const double r = 0.37;
  const double s = std::sqrt(5.0) * r / ls;
  const double expected = 1.3 * (1.0 + s + s * s / 3.0) * std::exp(-s);
  CHECK(eval_kernel(k, Eigen::VectorXd::Constant(1, 0.1), Eigen::VectorXd::Constant(1, 0.1 + r)) ==
        doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("single point gram carries jitter on the diagonal") {
  KernelSpec k = KernelSpec::isotropic(KernelFamily::SquaredExponential, 2, 0.3, 1.0);
  k.jitter = 1e-6;
  const Eigen::MatrixXd g = gram_matrix(k, Eigen::RowVector2d(0.2, 0.9));
  REQUIRE(g.rows() == 1);
  CHECK(g(0, 0) == doctest::Approx(1.0 + 1e-6).epsilon(1e-15));
}

TEST_CASE("gram matrices are symmetric and positive semi-definite") {
  Rng rng(7);
  for (KernelFamily family : {KernelFamily::SquaredExponential, KernelFamily::Matern52, KernelFamily::Linear}) {
    for (int rep = 0; rep < 20; ++rep) {
      const Eigen::Index n = 2 + rep % 31;
      const Eigen::MatrixXd pts = oracle::uniform_points(n, 2, rng);
      KernelSpec k = KernelSpec::isotropic(family, 2, 0.2 + 0.05 * rep, 1.0);
      k.jitter = 1e-6;
      const Eigen::MatrixXd g = gram_matrix(k, pts);
      CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
    }
  }
}

TEST_CASE("five random points in the unit square") {
  Rng rng(11);
  const Eigen::MatrixXd pts = oracle::uniform_points(5, 2, rng);
  const Eigen::MatrixXd g = gram_matrix(KernelSpec::isotropic(KernelFamily::SquaredExponential, 2, 0.3), pts);
  CHECK(g(0, 1) == g(1, 0));
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().minCoeff() >= -1e-8);
}

TEST_CASE("evaluation is symmetric in its arguments") {
  Rng rng(3);
  for (KernelFamily family : {KernelFamily::SquaredExponential, KernelFamily::Matern52, KernelFamily::Linear}) {
    KernelSpec k = KernelSpec::isotropic(family, 3, 0.25, 0.7);
    k.lengthscales << 0.1, 0.5, 2.0;
    for (int rep = 0; rep < 100; ++rep) {
      const Eigen::MatrixXd p = oracle::uniform_points(2, 3, rng);
      CHECK(eval_kernel(k, p.row(0).transpose(), p.row(1).transpose()) ==
            eval_kernel(k, p.row(1).transpose(), p.row(0).transpose()));
    }
  }
}

TEST_CASE("rescaling a coordinate with its lengthscale leaves stationary kernels unchanged") {
  Rng rng(5);
  std::uniform_real_distribution<double> scale(0.2, 5.0);
  for (KernelFamily family : {KernelFamily::SquaredExponential, KernelFamily::Matern52}) {
    for (int rep = 0; rep < 50; ++rep) {
      KernelSpec k = KernelSpec::isotropic(family, 3, 0.3);
      const Eigen::MatrixXd p = oracle::uniform_points(2, 3, rng);
      Eigen::VectorXd u = p.row(0).transpose();
      Eigen::VectorXd v = p.row(1).transpose();
      const double before = eval_kernel(k, u, v);
      const Eigen::Index i = rep % 3;
      const double c = scale(rng);
      u(i) *= c;
      v(i) *= c;
      k.lengthscales(i) *= c;
      CHECK(std::abs(eval_kernel(k, u, v) - before) <= 1e-12);
    }
  }
}

TEST_CASE("cross kernel agrees with pointwise evaluation and omits jitter") {
  Rng rng(9);
  KernelSpec k = KernelSpec::isotropic(KernelFamily::Matern52, 2, 0.3);
  k.jitter = 0.5;
  const Eigen::MatrixXd a = oracle::uniform_points(4, 2, rng);
  const Eigen::MatrixXd c = cross_kernel(k, a, a);
  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(c(i, i) == doctest::Approx(1.0));
    const Eigen::VectorXd col = kernel_column(k, a.row(i).transpose(), a);
    CHECK((col - c.col(i)).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("invalid specs and mismatched dimensions are rejected") {
  KernelSpec k = KernelSpec::isotropic(KernelFamily::SquaredExponential, 2, 0.3);
  CHECK_THROWS_AS(eval_kernel(k, Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()), InvalidInput);
  CHECK_THROWS_AS(gram_matrix(k, Eigen::MatrixXd(0, 2)), InvalidInput);
  CHECK_THROWS_AS(gram_matrix(k, Eigen::MatrixXd::Zero(3, 1)), InvalidInput);
  k.lengthscales(1) = 0.0;
  CHECK_THROWS_AS(k.validate(), InvalidInput);
  k = KernelSpec::isotropic(KernelFamily::SquaredExponential, 2, 0.3);
  k.signal_variance = -1.0;
  CHECK_THROWS_AS(k.validate(), InvalidInput);
  k = KernelSpec::isotropic(KernelFamily::SquaredExponential, 2, 0.3);
  k.jitter = -1e-9;
  CHECK_THROWS_AS(k.validate(), InvalidInput);
  CHECK_THROWS_AS(KernelSpec::isotropic(KernelFamily::SquaredExponential, 2, 0.3).validate(3), InvalidInput);
}

TEST_CASE("family names round trip") {
  for (KernelFamily f : {KernelFamily::SquaredExponential, KernelFamily::Matern52, KernelFamily::Linear}) {
    CHECK(parse_kernel_family(to_string(f)) == f);
  }
  CHECK_THROWS_AS(parse_kernel_family("rbf-ish"), InvalidInput);
}

}  // TEST_SUITE
