#include <benchmark/benchmark.h>

#include "borda/acquisition.hpp"
#include "borda/harness.hpp"
#include "borda/krr.hpp"
#include "borda/rkhs_norm.hpp"

namespace {

using namespace borda;

Eigen::MatrixXd points(Eigen::Index n, Eigen::Index dim, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd p(n, dim);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = u(rng);
  return p;
}

const KernelSpec kJoint = KernelSpec::isotropic(KernelFamily::SquaredExponential, 2, 0.3, 0.25);

void BM_PosteriorAppend(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::MatrixXd x = points(n + 1, 2, 1);
  for (auto _ : state) {
    state.PauseTiming();
    PosteriorState s = fit(kJoint, x.topRows(n), Eigen::VectorXd::Zero(n), 0.25, 0.5);
    state.ResumeTiming();
    s.append(x.row(n).transpose(), 1.0);
    benchmark::DoNotOptimize(s.whitened_residuals().data());
  }
}
BENCHMARK(BM_PosteriorAppend)->Arg(100)->Arg(250)->Arg(500);

void BM_BatchFit(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::MatrixXd x = points(n, 2, 2);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (auto _ : state) benchmark::DoNotOptimize(fit(kJoint, x, y, 0.25, 0.5).size());
}
BENCHMARK(BM_BatchFit)->Arg(100)->Arg(250)->Arg(500);

// One round of grid maintenance on the default 64 x 64 surface.
void BM_GridSync(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::MatrixXd grid = joint_grid(box_grid(1, 64), box_grid(1, 64));
  const Eigen::MatrixXd x = points(n + 1, 2, 3);
  for (auto _ : state) {
    state.PauseTiming();
    PosteriorState s = fit(kJoint, x.topRows(n), Eigen::VectorXd::Zero(n), 0.25, 0.5);
    QueryCache cache(s, grid);
    s.append(x.row(n).transpose(), 1.0);
    state.ResumeTiming();
    cache.sync(s);
    benchmark::DoNotOptimize(cache.mean().data());
  }
}
BENCHMARK(BM_GridSync)->Arg(100)->Arg(250)->Arg(500);

void BM_ProposeAE(benchmark::State& state) {
  const CandidateGrids g = make_grids(1, 1, 64);
  const BoundSurface b{Eigen::MatrixXd::Random(64, 64), Eigen::MatrixXd::Random(64, 64).array() + 2.0};
  Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(propose_duel(Strategy::BordaAE, b, g, rng).context_index);
}
BENCHMARK(BM_ProposeAE);

void BM_Trial(benchmark::State& state) {
  ExperimentConfig c;
  c.horizon = static_cast<std::size_t>(state.range(0));
  c.log_duels = false;
  for (auto _ : state) benchmark::DoNotOptimize(run_trial(c, Strategy::BordaAE, 0).final_regret.max_regret);
}
BENCHMARK(BM_Trial)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_NormPair(benchmark::State& state) {
  EnvSpec spec;
  spec.context_dim = state.range(0);
  spec.action_dim = state.range(1);
  const SyntheticEnv env = sample_env(spec);
  NormStudyOptions opt;
  for (auto _ : state) benchmark::DoNotOptimize(norm_pair(env, 512, 9, opt).first.norm_value);
}
BENCHMARK(BM_NormPair)->Args({0, 1})->Args({1, 1})->Args({3, 3})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
