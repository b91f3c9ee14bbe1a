// Invariants checked over many random instances or full default-length runs.

#include <doctest.h>

#include <numeric>

#include "borda/harness.hpp"
#include "oracles.hpp"

using namespace borda;

namespace {

const std::vector<TrialResult>& default_ae_runs() {
  static const std::vector<TrialResult> runs = [] {
    ExperimentConfig c;
    std::vector<TrialResult> out;
    for (std::uint64_t seed : c.seeds) out.push_back(run_trial(c, Strategy::BordaAE, seed));
    return out;
  }();
  return runs;
}

double window_mean(const std::vector<double>& v, std::size_t from, std::size_t to) {
  return std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(to), 0.0) /
         static_cast<double>(to - from);
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("adding an observation never widens the posterior on a grid") {
  Rng rng(71);
  const KernelSpec k = KernelSpec::isotropic(KernelFamily::SquaredExponential, 2, 0.2);
  const Eigen::MatrixXd q = oracle::uniform_points(100, 2, rng);
  PosteriorState s(k, 0.25, 0.5, 2);
  QueryCache cache(s, q);
  Eigen::VectorXd last = cache.stddev();
  for (int i = 0; i < 150; ++i) {
    s.append(oracle::uniform_points(1, 2, rng).row(0).transpose(), i % 2);
    cache.sync(s);
    CHECK((cache.stddev().array() <= last.array() + 1e-10).all());
    last = cache.stddev();
  }
}

TEST_CASE("summability holds on random query sequences") {
  Rng rng(72);
  for (int rep = 0; rep < 5; ++rep) {
    const KernelSpec k = KernelSpec::isotropic(KernelFamily::Matern52, 3, 0.1 + 0.1 * rep, 0.5 + rep);
    const double eta2 = 0.05 + 0.1 * rep;
    PosteriorState s(k, eta2, 0.0, 3);
    double var_sum = 0.0, gain = 0.0;
    for (int t = 0; t < 500; ++t) {
      const Eigen::VectorXd x = oracle::uniform_points(1, 3, rng).row(0).transpose();
      var_sum += s.predict(x).variance() / k.signal_variance;
      gain += s.info_gain_increment(x);
      s.append(x, t % 3);
    }
    // The bound assumes a unit prior variance; rescale the noise to match.
    const double eta2_unit = eta2 / k.signal_variance;
    CHECK(var_sum <= 2.0 / std::log1p(1.0 / eta2_unit) * gain * (1.0 + 1e-12));
  }
}

TEST_CASE("confidence width shrinks over a default-length run") {
  for (const TrialResult& r : default_ae_runs()) {
    CHECK(r.diagnostics.final_mean_width < r.diagnostics.initial_mean_width);
    CHECK(r.diagnostics.beta_nondecreasing);
  }
}

TEST_CASE("the selected acquisition value trends down") {
  std::vector<double> early, late;
  for (const TrialResult& r : default_ae_runs()) {
    const auto& obj = r.diagnostics.selected_objective;
    REQUIRE(obj.size() == 475);
    // Entry k belongs to round n0 + 1 + k.
    early.push_back(window_mean(obj, 0, 100));
    late.push_back(window_mean(obj, obj.size() - 100, obj.size()));
  }
  CHECK(window_mean(late, 0, late.size()) < window_mean(early, 0, early.size()));
}

TEST_CASE("opponents in a run are uniform over the action grid") {
  const ExperimentConfig c;
  const TrialResult& r = default_ae_runs().front();
  const CandidateGrids g = make_grids(c.context_dim, c.action_dim, c.grid_per_dim, c.sobol_size, c.grid_seed);
  std::vector<double> counts(static_cast<std::size_t>(g.num_actions()), 0.0);
  for (const DuelObservation& d : r.duels) {
    const auto idx = static_cast<std::size_t>(std::llround(d.opponent(0) * (g.num_actions() - 1)));
    REQUIRE(g.actions(static_cast<Eigen::Index>(idx), 0) == d.opponent(0));
    ++counts[idx];
  }
  const double expected = static_cast<double>(r.duels.size()) / counts.size();
  double chi = 0.0;
  for (double n : counts) chi += (n - expected) * (n - expected) / expected;
  CHECK(chi <= oracle::chi2_quantile(static_cast<double>(counts.size() - 1), 2.326));
}

TEST_CASE("regret is never negative along a run") {
  for (const TrialResult& r : default_ae_runs()) {
    for (const TraceRow& row : r.trace.rows) CHECK(row.median_regret >= 0.0);
    CHECK((r.final_regret.per_context.array() >= 0.0).all());
  }
}

}  // TEST_SUITE
