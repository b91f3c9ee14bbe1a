#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "borda/acquisition.hpp"
#include "borda/config.hpp"
#include "borda/duel_model.hpp"
#include "borda/policy.hpp"
#include "borda/rkhs_norm.hpp"

namespace borda {

std::string_view library_version();

struct TraceRow {
  std::size_t round = 0;
  double max_regret = 0.0;
  double median_regret = 0.0;
  double wall_ms = 0.0;
};

struct RegretTrace {
  Strategy strategy = Strategy::BordaAE;
  std::uint64_t seed = 0;
  std::vector<TraceRow> rows;
};

/// Per-trial quantities used to check the confidence and summability claims.
struct TrialDiagnostics {
  double queried_variance_sum = 0.0;
  double info_gain = 0.0;
  // (2 / log(1 + 1/eta^2)) * info_gain
  double summability_bound = 0.0;
  bool beta_nondecreasing = true;
  std::size_t coverage_checks = 0;
  std::size_t coverage_escapes = 0;
  double initial_mean_width = 0.0;
  double final_mean_width = 0.0;
  // Acquisition objective of the context actually queried, one per active round.
  std::vector<double> selected_objective;
};

struct TrialResult {
  RegretTrace trace;
  std::vector<DuelObservation> duels;
  PolicyTable policy;
  RegretProfile final_regret;
  TrialDiagnostics diagnostics;
};

/// Grid state at one round, for plotting.
struct SurfaceDump {
  std::size_t round = 0;
  Eigen::MatrixXd truth;  // grid Borda values
  Eigen::MatrixXd reward;
  Eigen::MatrixXd mean;
  Eigen::MatrixXd stddev;
  Eigen::MatrixXd lower;
  Eigen::MatrixXd upper;
  Eigen::VectorXd acquisition;  // per context
  PolicyTable policy;
  RegretProfile regret;
};

using SurfaceSink = std::function<void(const SurfaceDump&)>;

/// Seeds n0 uniform duels, then runs the chosen strategy up to T. The world
/// and the initial duels depend only on `seed`, so strategies sharing a seed
/// face the same reward function and the same starting data.
TrialResult run_trial(const ExperimentConfig& config, Strategy strategy, std::uint64_t seed,
                      const SurfaceSink& sink = {});

struct AggregateRow {
  Strategy strategy = Strategy::BordaAE;
  std::size_t round = 0;
  std::size_t seeds = 0;
  double mean_max = 0.0;
  double se_max = 0.0;
  double mean_median = 0.0;
  double se_median = 0.0;
};

/// Mean and standard error (sample sd / sqrt(n)) across seeds per strategy and round.
std::vector<AggregateRow> aggregate(const std::vector<RegretTrace>& traces);

struct TrialFailure {
  Strategy strategy = Strategy::BordaAE;
  std::uint64_t seed = 0;
  std::string message;
  bool numerical = false;
};

struct ComparisonReport {
  std::vector<TrialResult> completed;
  std::vector<TrialFailure> failures;
  std::vector<AggregateRow> rows;
};

/// Runs every (strategy, seed) pair and writes traces, duel logs, policies,
/// aggregate.csv and meta.json into config.output_dir.
ComparisonReport run_comparison(const ExperimentConfig& config);

/// Runs one trial and writes its files into config.output_dir.
TrialResult run_single(const ExperimentConfig& config, Strategy strategy, std::uint64_t seed);

/// Runs one trial, writing grid surfaces at every round in config.dump_rounds.
TrialResult dump_surfaces(const ExperimentConfig& config, Strategy strategy, std::uint64_t seed);

/// Runs compare_norms for every row in config.norm_rows and writes norms.csv.
std::vector<NormComparison> run_norm_study(const ExperimentConfig& config);

// CSV emitters; the column layout is part of the output contract.
void write_trace_csv(const std::string& path, const RegretTrace& trace);
void write_duels_csv(const std::string& path, const std::vector<DuelObservation>& duels);
void write_policy_csv(const std::string& path, const CandidateGrids& grids, const PolicyTable& policy,
                      const RegretProfile& regret);
void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows);
void write_norms_csv(const std::string& path, const std::vector<NormComparison>& rows);

std::string trace_file_name(Strategy strategy, std::uint64_t seed);
std::string duels_file_name(Strategy strategy, std::uint64_t seed);
std::string policy_file_name(Strategy strategy, std::uint64_t seed);

}  // namespace borda
