#include <doctest.h>

#include "borda/duel_model.hpp"
#include "borda/errors.hpp"
#include "oracles.hpp"

using namespace borda;

namespace {

KernelSpec joint_se(double ls = 0.3) { return KernelSpec::isotropic(KernelFamily::SquaredExponential, 2, ls, 1.0); }

DuelObservation duel(double x, double a, int outcome, std::size_t round = 0) {
  DuelObservation obs;
  obs.context = Eigen::VectorXd::Constant(1, x);
  obs.action = Eigen::VectorXd::Constant(1, a);
  obs.opponent = Eigen::VectorXd::Constant(1, 0.5);
  obs.outcome = outcome;
  obs.round = round;
  return obs;
}

BetaSchedule schedule(double b = 1.0) {
  BetaSchedule s;
  s.rkhs_bound = b;
  s.delta = 0.05;
  return s;
}

}  // namespace

TEST_SUITE("duel_model") {

TEST_CASE("beta on an empty model") {
  const BordaEstimate m(1, 1, joint_se(), 0.25, schedule(1.0));
  const double beta = 2.0 + std::sqrt(1.0 + std::log(40.0));
  CHECK(m.beta() == doctest::Approx(beta).epsilon(1e-14));
  CHECK(m.beta() == doctest::Approx(4.1654).epsilon(1e-4));
  const ConfidenceInterval ci = m.confidence_bounds(Eigen::VectorXd::Constant(1, 0.2), Eigen::VectorXd::Constant(1, 0.7));
  CHECK(ci.lower == doctest::Approx(0.5 - beta));
  CHECK(ci.upper == doctest::Approx(0.5 + beta));
}

TEST_CASE("one win pulls the mean toward 1") {
  BordaEstimate m(1, 1, joint_se(), 0.25, schedule());
  m.ingest(duel(0.3, 0.4, 1));
  CHECK(m.predict(Eigen::VectorXd::Constant(1, 0.3), Eigen::VectorXd::Constant(1, 0.4)).mean > 0.5);
  CHECK(m.rounds_seen() == 1);
  m = ingest(std::move(m), duel(0.8, 0.1, 0));
  CHECK(m.predict(Eigen::VectorXd::Constant(1, 0.8), Eigen::VectorXd::Constant(1, 0.1)).mean < 0.5);
  CHECK(m.rounds_seen() == 2);
}

TEST_CASE("ingesting 500 duels equals a batch fit on centered outcomes") {
  Rng rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution coin(0.4);
  BordaEstimate m(1, 1, joint_se(0.2), 0.25, schedule(2.0));
  Eigen::MatrixXd x(500, 2);
  Eigen::VectorXd y(500);
  for (int i = 0; i < 500; ++i) {
    const DuelObservation obs = duel(u(rng), u(rng), coin(rng) ? 1 : 0, static_cast<std::size_t>(i));
    m.ingest(obs);
    x.row(i) << obs.context(0), obs.action(0);
    y(i) = obs.outcome;
  }
  const Eigen::MatrixXd q = oracle::uniform_points(100, 2, rng);
  const auto ref = oracle::dense_posterior(joint_se(0.2), x, y, 0.25, 0.5, q);
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    const Prediction p = m.predict(q.row(i).head(1).transpose(), q.row(i).tail(1).transpose());
    CHECK(std::abs(p.mean - ref.mean(i)) <= 1e-8);
    CHECK(std::abs(p.stddev - ref.stddev(i)) <= 1e-8);
  }
}

TEST_CASE("information gain on a near-orthogonal design") {
  BordaEstimate m(1, 1, joint_se(0.01), 0.25, schedule());
  const int n = 25;
  for (int i = 0; i < n; ++i) m.ingest(duel((i % 5) / 4.0, (i / 5) / 4.0, i % 2));
  const double expected = n * 0.5 * std::log1p(1.0 / 0.25);
  CHECK(std::abs(m.schedule().accumulated_info_gain - expected) <= 0.05 * expected);
}

TEST_CASE("bounds are symmetric about the mean and collapse with the deviation") {
  BordaEstimate m(1, 1, joint_se(), 0.25, schedule());
  for (int i = 0; i < 10; ++i) m.ingest(duel(0.1 * i, 0.5, i % 2));
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.35);
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(1, 0.45);
  const Prediction p = m.predict(x, a);
  const ConfidenceInterval ci = confidence_bounds(m, x, a);
  CHECK(ci.upper >= ci.lower);
  CHECK((ci.upper - ci.lower) == doctest::Approx(2.0 * m.beta() * p.stddev));
  CHECK((ci.upper + ci.lower) / 2.0 == doctest::Approx(p.mean));

  BetaSchedule fixed = schedule();
  fixed.mode = BetaMode::Fixed;
  fixed.fixed_beta = 0.0;
  BordaEstimate flat(1, 1, joint_se(), 0.25, fixed);
  const ConfidenceInterval z = flat.confidence_bounds(x, a);
  CHECK(z.lower == z.upper);
}

TEST_CASE("beta never decreases as data arrives") {
  Rng rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (BetaMode mode : {BetaMode::GreedyOnline, BetaMode::AnalyticLinear}) {
    BetaSchedule s = schedule(2.0);
    s.mode = mode;
    s.linear_dim = 2;
    BordaEstimate m(1, 1, joint_se(), 0.25, s);
    double last = m.beta();
    for (int i = 0; i < 200; ++i) {
      m.ingest(duel(u(rng), u(rng), i % 2));
      CHECK(m.beta() >= last);
      last = m.beta();
    }
  }
}

TEST_CASE("analytic schedule pins the information gain to d log t") {
  BetaSchedule s = schedule(2.0);
  s.mode = BetaMode::AnalyticLinear;
  s.linear_dim = 3;
  CHECK(s.info_gain(100) == doctest::Approx(3.0 * std::log(100.0)));
  CHECK(s.beta(100) == doctest::Approx(4.0 + std::sqrt(2.0 * 3.0 * std::log(100.0) + 1.0 + std::log(40.0))));
}

TEST_CASE("queried variance sum is bounded by the information gain") {
  Rng rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BordaEstimate m(1, 1, joint_se(0.2), 0.25, schedule());
  const double c = 2.0 / std::log1p(1.0 / 0.25);
  for (int i = 0; i < 500; ++i) {
    m.ingest(duel(u(rng), u(rng), i % 2));
    CHECK(m.queried_variance_sum() <= c * m.schedule().accumulated_info_gain);
  }
}

TEST_CASE("grid bounds and the incremental tracker agree with pointwise bounds") {
  Rng rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BordaEstimate m(1, 1, joint_se(0.2), 0.25, schedule());
  const Eigen::MatrixXd contexts = Eigen::VectorXd::LinSpaced(7, 0.0, 1.0);
  const Eigen::MatrixXd actions = Eigen::VectorXd::LinSpaced(5, 0.0, 1.0);
  SurfaceTracker tracker(m, contexts, actions);
  for (int i = 0; i < 40; ++i) {
    m.ingest(duel(u(rng), u(rng), i % 2));
    tracker.sync(m);
  }
  const BoundSurface direct = bound_surface(m, contexts, actions);
  const BoundSurface cached = tracker.bounds(m.beta());
  for (Eigen::Index i = 0; i < 7; ++i) {
    for (Eigen::Index j = 0; j < 5; ++j) {
      const ConfidenceInterval ci = m.confidence_bounds(contexts.row(i).transpose(), actions.row(j).transpose());
      CHECK(direct.lower(i, j) == doctest::Approx(ci.lower).epsilon(1e-12));
      CHECK(direct.upper(i, j) == doctest::Approx(ci.upper).epsilon(1e-12));
      CHECK(std::abs(cached.lower(i, j) - ci.lower) <= 1e-8);
      CHECK(std::abs(cached.upper(i, j) - ci.upper) <= 1e-8);
    }
  }
  const Eigen::MatrixXd joint = joint_grid(contexts, actions);
  CHECK(joint(3 * 5 + 2, 0) == contexts(3, 0));
  CHECK(joint(3 * 5 + 2, 1) == actions(2, 0));
}

TEST_CASE("ingest refuses observations that break the reduction") {
  BordaEstimate m(1, 1, joint_se(), 0.25, schedule());
  DuelObservation obs = duel(0.2, 0.3, 1);
  obs.opponent_uniform = false;
  CHECK_THROWS_AS(m.ingest(obs), InvalidInput);
  obs = duel(0.2, 0.3, 2);
  CHECK_THROWS_AS(m.ingest(obs), InvalidInput);
  obs = duel(1.2, 0.3, 1);
  CHECK_THROWS_AS(m.ingest(obs), InvalidInput);
  obs = duel(0.2, 0.3, 1);
  obs.action = Eigen::Vector2d(0.1, 0.1);
  CHECK_THROWS_AS(m.ingest(obs), InvalidInput);
  CHECK(m.rounds_seen() == 0);
}

TEST_CASE("schedule validation and mode names") {
  BetaSchedule s;
  s.delta = 1.0;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  s = BetaSchedule{};
  s.rkhs_bound = 0.0;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  for (BetaMode m : {BetaMode::GreedyOnline, BetaMode::AnalyticLinear, BetaMode::Fixed}) {
    CHECK(parse_beta_mode(to_string(m)) == m);
  }
  CHECK(parse_beta_mode("beta-lite") == BetaMode::Fixed);
}

}  // TEST_SUITE
