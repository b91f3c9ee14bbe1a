#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "borda/harness.hpp"

using namespace borda;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(const std::string& out) {
  ExperimentConfig c;
  c.horizon = 60;
  c.n0 = 10;
  c.eval_every = 10;
  c.grid_per_dim = 16;
  c.seeds = {0, 1, 2};
  c.output_dir = (fs::temp_directory_path() / out).string();
  fs::remove_all(c.output_dir);
  return c;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("a degenerate horizon yields only the initial evaluation") {
  ExperimentConfig c = small_config("borda_degenerate");
  c.horizon = c.n0;
  const TrialResult r = run_trial(c, Strategy::BordaAE, 0);
  REQUIRE(r.trace.rows.size() == 1);
  CHECK(r.trace.rows[0].round == c.n0);
  CHECK(r.duels.size() == c.n0);
}

TEST_CASE("trials are deterministic and well formed") {
  const ExperimentConfig c = small_config("borda_det");
  for (Strategy s : {Strategy::BordaAE, Strategy::BordaUCB, Strategy::BordaUniform}) {
    const TrialResult a = run_trial(c, s, 4);
    const TrialResult b = run_trial(c, s, 4);
    REQUIRE(a.trace.rows.size() == b.trace.rows.size());
    std::size_t last = 0;
    for (std::size_t i = 0; i < a.trace.rows.size(); ++i) {
      CHECK(a.trace.rows[i].max_regret == b.trace.rows[i].max_regret);
      CHECK(a.trace.rows[i].median_regret == b.trace.rows[i].median_regret);
      CHECK(a.trace.rows[i].round > last);
      CHECK(a.trace.rows[i].max_regret >= a.trace.rows[i].median_regret);
      CHECK(a.trace.rows[i].median_regret >= 0.0);
      last = a.trace.rows[i].round;
    }
    CHECK(last == c.horizon);
    CHECK(a.duels.size() == c.horizon);
    CHECK(a.diagnostics.beta_nondecreasing);
    CHECK(a.diagnostics.queried_variance_sum <= a.diagnostics.summability_bound);
  }
}

TEST_CASE("strategies share the environment and the initial design") {
  const ExperimentConfig c = small_config("borda_shared");
  const TrialResult ae = run_trial(c, Strategy::BordaAE, 2);
  const TrialResult un = run_trial(c, Strategy::BordaUniform, 2);
  for (std::size_t i = 0; i < c.n0; ++i) {
    CHECK(ae.duels[i].context == un.duels[i].context);
    CHECK(ae.duels[i].action == un.duels[i].action);
    CHECK(ae.duels[i].outcome == un.duels[i].outcome);
  }
  CHECK(ae.trace.rows[0].max_regret == un.trace.rows[0].max_regret);
}

TEST_CASE("identical seeds aggregate with zero standard error") {
  const ExperimentConfig c = small_config("borda_agg0");
  const TrialResult r = run_trial(c, Strategy::BordaUCB, 1);
  const std::vector<RegretTrace> traces(10, r.trace);
  const std::vector<AggregateRow> rows = aggregate(traces);
  REQUIRE(rows.size() == r.trace.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].seeds == 10);
    CHECK(rows[i].se_max == 0.0);
    CHECK(rows[i].se_median == 0.0);
    CHECK(rows[i].mean_max == doctest::Approx(r.trace.rows[i].max_regret).epsilon(1e-15));
  }
}

TEST_CASE("comparison output matches a recomputation from the trace files") {
  const ExperimentConfig c = small_config("borda_cmp");
  const ComparisonReport report = run_comparison(c);
  CHECK(report.failures.empty());
  CHECK(report.completed.size() == 9);

  std::map<std::pair<std::string, std::string>, std::vector<double>> max_by, med_by;
  for (Strategy s : c.strategies) {
    for (std::uint64_t seed : c.seeds) {
      const auto rows = read_csv(fs::path(c.output_dir) / trace_file_name(s, seed));
      REQUIRE(rows.size() > 1);
      CHECK(rows[0] == std::vector<std::string>{"round", "max_regret", "median_regret", "wall_ms"});
      for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 4);
        max_by[{std::string(to_string(s)), rows[i][0]}].push_back(std::stod(rows[i][1]));
        med_by[{std::string(to_string(s)), rows[i][0]}].push_back(std::stod(rows[i][2]));
      }
      CHECK(fs::exists(fs::path(c.output_dir) / duels_file_name(s, seed)));
    }
  }
  const auto agg = read_csv(fs::path(c.output_dir) / "aggregate.csv");
  CHECK(agg[0][0] == "strategy");
  CHECK(agg.size() == 1 + max_by.size());
  for (std::size_t i = 1; i < agg.size(); ++i) {
    REQUIRE(agg[i].size() == 7);
    const auto& maxes = max_by.at({agg[i][0], agg[i][1]});
    const auto& meds = med_by.at({agg[i][0], agg[i][1]});
    double m = 0.0, d = 0.0;
    for (double v : maxes) m += v / maxes.size();
    for (double v : meds) d += v / meds.size();
    double ss = 0.0;
    for (double v : maxes) ss += (v - m) * (v - m);
    const double se = std::sqrt(ss / (maxes.size() - 1)) / std::sqrt(static_cast<double>(maxes.size()));
    CHECK(std::stod(agg[i][3]) == doctest::Approx(m).epsilon(1e-12));
    CHECK(std::stod(agg[i][4]) == doctest::Approx(se).epsilon(1e-9));
    CHECK(std::stod(agg[i][5]) == doctest::Approx(d).epsilon(1e-12));
  }

  const auto meta = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "meta.json"));
  CHECK(meta["config_hash"] == config_hash(c));
  CHECK(meta["library_version"] == std::string(library_version()));
  CHECK(meta["config"]["T"] == "60");
  CHECK(meta["failed_trials"].empty());
}

TEST_CASE("duel log rows carry every coordinate") {
  ExperimentConfig c = small_config("borda_duels");
  c.context_dim = 2;
  c.action_dim = 1;
  c.grid_per_dim = 6;
  c.seeds = {0};
  c.strategies = {Strategy::BordaAE};
  const TrialResult r = run_single(c, Strategy::BordaAE, 0);
  const auto rows = read_csv(fs::path(c.output_dir) / duels_file_name(Strategy::BordaAE, 0));
  CHECK(rows[0] == std::vector<std::string>{"round", "x0", "x1", "a0", "opp0", "outcome"});
  CHECK(rows.size() == 1 + r.duels.size());
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].size() == 6);
  CHECK(fs::exists(fs::path(c.output_dir) / "meta.json"));
}

TEST_CASE("a failing trial leaves the others intact") {
  ExperimentConfig c = small_config("borda_isolation");
  // No regularization at all: any repeated grid cell makes the factor singular.
  c.noise_variance = 1e-300;
  c.model_jitter = 0.0;
  c.horizon = c.n0 = 25;
  c.grid_per_dim = 8;
  c.seeds = {0, 1, 2, 3, 4, 5};
  c.strategies = {Strategy::BordaUniform};
  const ComparisonReport report = run_comparison(c);
  REQUIRE(!report.failures.empty());
  CHECK(report.failures.front().numerical);
  for (const TrialFailure& f : report.failures) {
    CHECK(!fs::exists(fs::path(c.output_dir) / trace_file_name(f.strategy, f.seed)));
  }
  for (const TrialResult& r : report.completed) {
    CHECK(fs::exists(fs::path(c.output_dir) / trace_file_name(r.trace.strategy, r.trace.seed)));
  }
  const auto meta = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "meta.json"));
  CHECK(meta["failed_trials"].size() == report.failures.size());
}

TEST_CASE("surface dumps cover the requested rounds") {
  ExperimentConfig c = small_config("borda_dump");
  c.dump_rounds = {10, 30};
  c.grid_per_dim = 8;
  dump_surfaces(c, Strategy::BordaAE, 0);
  for (int t : {10, 30}) {
    const auto surface = read_csv(fs::path(c.output_dir) / ("surface_borda-ae_0_t" + std::to_string(t) + ".csv"));
    CHECK(surface.size() == 1 + 64);
    CHECK(surface[0].back() == "upper");
    const auto contexts = read_csv(fs::path(c.output_dir) / ("contexts_borda-ae_0_t" + std::to_string(t) + ".csv"));
    CHECK(contexts.size() == 1 + 8);
  }
  CHECK(!fs::exists(fs::path(c.output_dir) / "surface_borda-ae_0_t20.csv"));
}

TEST_CASE("norm study writes one row per configured shape") {
  ExperimentConfig c = small_config("borda_norms");
  c.norm_rows = {{0, 1}, {1, 1}};
  c.norm_trials = 3;
  c.norm_mc_samples = 32;
  c.norm_sample_points = 100;
  const auto rows = run_norm_study(c);
  REQUIRE(rows.size() == 2);
  const auto csv = read_csv(fs::path(c.output_dir) / "norms.csv");
  CHECK(csv[0] == std::vector<std::string>{"d_x", "d_a", "trials", "win_rate", "win_margin"});
  CHECK(csv.size() == 3);
  CHECK(csv[2][0] == "1");
  CHECK(csv[2][2] == "3");
}

}  // TEST_SUITE
