#include "borda/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "borda/errors.hpp"
#include "borda/parallel.hpp"
#include "borda/random.hpp"

#ifndef BORDA_VERSION_STRING
#define BORDA_VERSION_STRING "0.0.0"
#endif

namespace borda {
namespace {

// Stream ids for derive_seed; the env and the initial design ignore strategy.
constexpr std::uint64_t kEnvStream = 0;
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kProposalStream = 16;
constexpr std::uint64_t kOutcomeStream = 32;

std::string num(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

CandidateGrids trial_grids(const ExperimentConfig& config) {
  return make_grids(config.context_dim, config.action_dim, config.grid_per_dim, config.sobol_size, config.grid_seed);
}

std::uint64_t strategy_stream(Strategy s) { return static_cast<std::uint64_t>(s); }

bool wants_dump(const ExperimentConfig& config, std::size_t round) {
  return std::find(config.dump_rounds.begin(), config.dump_rounds.end(), round) != config.dump_rounds.end();
}

void append_point(std::string& line, const Eigen::VectorXd& v) {
  for (Eigen::Index d = 0; d < v.size(); ++d) {
    line += ',';
    line += num(v(d));
  }
}

std::string point_header(const char* prefix, Eigen::Index dim) {
  std::string out;
  for (Eigen::Index d = 0; d < dim; ++d) out += std::string(",") + prefix + std::to_string(d);
  return out;
}

}  // namespace

std::string_view library_version() { return BORDA_VERSION_STRING; }

TrialResult run_trial(const ExperimentConfig& config, Strategy strategy, std::uint64_t seed,
                      const SurfaceSink& sink) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed_ms = [&] {
    if (!config.record_timing) return 0.0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };

  const SyntheticEnv env = sample_env(config.env_spec(derive_seed(seed, kEnvStream)));
  const CandidateGrids grids = trial_grids(config);
  const Eigen::MatrixXd rewards = reward_surface(env, grids.contexts, grids.actions);
  const bool need_truth = config.track_coverage || static_cast<bool>(sink);
  const Eigen::MatrixXd truth = need_truth ? borda_surface(env, grids.contexts, grids.actions) : Eigen::MatrixXd();

  Rng init_rng(derive_seed(seed, kInitStream));
  Rng proposal_rng(derive_seed(seed, kProposalStream + strategy_stream(strategy)));
  Rng outcome_rng(derive_seed(seed, kOutcomeStream + strategy_stream(strategy)));

  TrialResult result;
  result.trace.strategy = strategy;
  result.trace.seed = seed;
  TrialDiagnostics& diag = result.diagnostics;

  BordaEstimate model(config.context_dim, config.action_dim, config.model_kernel_spec(), config.noise_variance,
                      config.beta_schedule());
  const auto record = [&](const DuelProposal& p, int outcome, std::size_t round) {
    DuelObservation obs = p.observe(outcome, round);
    model.ingest(obs);
    if (config.log_duels) result.duels.push_back(std::move(obs));
  };

  for (std::size_t i = 1; i <= config.n0; ++i) {
    const DuelProposal p = uniform_duel(grids, init_rng);
    record(p, env.duel_outcome(p.context, p.action, p.opponent, init_rng), i);
  }

  SurfaceTracker tracker(model, grids.contexts, grids.actions);
  LowerEnvelope envelope(grids);
  double beta = model.beta();
  BoundSurface bounds = tracker.bounds(beta);
  envelope.absorb(bounds);

  const auto check_coverage = [&] {
    if (!config.track_coverage) return;
    for (Eigen::Index i = 0; i < truth.rows(); ++i) {
      for (Eigen::Index j = 0; j < truth.cols(); ++j) {
        const double f = truth(i, j);
        if (f < bounds.lower(i, j) || f > bounds.upper(i, j)) ++diag.coverage_escapes;
        ++diag.coverage_checks;
      }
    }
  };
  const auto evaluate = [&](std::size_t round) {
    const PolicyTable policy = extract_policy(envelope);
    const RegretProfile regret = regret_profile(policy, rewards);
    result.trace.rows.push_back({round, regret.max_regret, regret.median_regret, elapsed_ms()});
    if (sink && wants_dump(config, round)) {
      SurfaceDump dump;
      dump.round = round;
      dump.truth = truth;
      dump.reward = rewards;
      dump.mean = tracker.mean();
      dump.stddev = tracker.stddev();
      dump.lower = bounds.lower;
      dump.upper = bounds.upper;
      dump.acquisition = context_objective(bounds);
      dump.policy = policy;
      dump.regret = regret;
      sink(dump);
    }
  };

  diag.initial_mean_width = (bounds.upper - bounds.lower).mean();
  check_coverage();
  evaluate(config.n0);

  for (std::size_t t = config.n0 + 1; t <= config.horizon; ++t) {
    const DuelProposal p = propose_duel(strategy, bounds, grids, proposal_rng);
    diag.selected_objective.push_back(context_objective(bounds)(p.context_index));
    record(p, env.duel_outcome(p.context, p.action, p.opponent, outcome_rng), t);
    tracker.sync(model);
    const double next_beta = model.beta();
    if (next_beta < beta) diag.beta_nondecreasing = false;
    beta = next_beta;
    bounds = tracker.bounds(beta);
    envelope.absorb(bounds);
    check_coverage();
    if ((t - config.n0) % config.eval_every == 0 || t == config.horizon) evaluate(t);
  }

  diag.final_mean_width = (bounds.upper - bounds.lower).mean();
  diag.queried_variance_sum = model.queried_variance_sum();
  diag.info_gain = model.schedule().accumulated_info_gain;
  diag.summability_bound = 2.0 / std::log1p(1.0 / config.noise_variance) * diag.info_gain;
  result.policy = extract_policy(envelope);
  result.final_regret = regret_profile(result.policy, rewards);
  return result;
}

std::vector<AggregateRow> aggregate(const std::vector<RegretTrace>& traces) {
  // (strategy, round) -> per-seed values, ordered by strategy then round.
  std::map<std::pair<int, std::size_t>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const RegretTrace& trace : traces) {
    for (const TraceRow& row : trace.rows) {
      auto& g = groups[{static_cast<int>(trace.strategy), row.round}];
      g.first.push_back(row.max_regret);
      g.second.push_back(row.median_regret);
    }
  }
  // Deviations are taken from the first value so identical seeds give exactly zero spread.
  const auto mean_se = [](const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double shift = 0.0;
    for (double x : v) shift += x - v.front();
    shift /= n;
    const double mean = v.front() + shift;
    if (v.size() < 2) return std::pair{mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - v.front() - shift) * (x - v.front() - shift);
    return std::pair{mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
  };
  std::vector<AggregateRow> rows;
  for (const auto& [key, values] : groups) {
    AggregateRow row;
    row.strategy = static_cast<Strategy>(key.first);
    row.round = key.second;
    row.seeds = values.first.size();
    std::tie(row.mean_max, row.se_max) = mean_se(values.first);
    std::tie(row.mean_median, row.se_median) = mean_se(values.second);
    rows.push_back(row);
  }
  return rows;
}

std::string trace_file_name(Strategy strategy, std::uint64_t seed) {
  return "trace_" + std::string(to_string(strategy)) + "_" + std::to_string(seed) + ".csv";
}

std::string duels_file_name(Strategy strategy, std::uint64_t seed) {
  return "duels_" + std::string(to_string(strategy)) + "_" + std::to_string(seed) + ".csv";
}

std::string policy_file_name(Strategy strategy, std::uint64_t seed) {
  return "policy_" + std::string(to_string(strategy)) + "_" + std::to_string(seed) + ".csv";
}

void write_trace_csv(const std::string& path, const RegretTrace& trace) {
  auto out = open_out(path);
  out << "round,max_regret,median_regret,wall_ms\n";
  for (const TraceRow& r : trace.rows) {
    out << r.round << ',' << num(r.max_regret) << ',' << num(r.median_regret) << ',' << num(r.wall_ms) << '\n';
  }
}

void write_duels_csv(const std::string& path, const std::vector<DuelObservation>& duels) {
  auto out = open_out(path);
  const Eigen::Index dx = duels.empty() ? 0 : duels.front().context.size();
  const Eigen::Index da = duels.empty() ? 0 : duels.front().action.size();
  out << "round" << point_header("x", dx) << point_header("a", da) << point_header("opp", da) << ",outcome\n";
  for (const DuelObservation& d : duels) {
    std::string line = std::to_string(d.round);
    append_point(line, d.context);
    append_point(line, d.action);
    append_point(line, d.opponent);
    line += ',' + std::to_string(d.outcome);
    out << line << '\n';
  }
}

void write_policy_csv(const std::string& path, const CandidateGrids& grids, const PolicyTable& policy,
                      const RegretProfile& regret) {
  auto out = open_out(path);
  out << "context_index" << point_header("x", grids.contexts.cols()) << ",action_index"
      << point_header("a", grids.actions.cols()) << ",pessimistic_value,regret\n";
  for (Eigen::Index i = 0; i < grids.num_contexts(); ++i) {
    const Eigen::Index a = policy.action_index[static_cast<std::size_t>(i)];
    std::string line = std::to_string(i);
    append_point(line, grids.contexts.row(i).transpose());
    line += ',' + std::to_string(a);
    append_point(line, grids.actions.row(a).transpose());
    line += ',' + num(policy.value(i)) + ',' + num(regret.per_context(i));
    out << line << '\n';
  }
}

void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows) {
  auto out = open_out(path);
  out << "strategy,round,seeds,mean_max_regret,se_max_regret,mean_median_regret,se_median_regret\n";
  for (const AggregateRow& r : rows) {
    out << to_string(r.strategy) << ',' << r.round << ',' << r.seeds << ',' << num(r.mean_max) << ','
        << num(r.se_max) << ',' << num(r.mean_median) << ',' << num(r.se_median) << '\n';
  }
}

void write_norms_csv(const std::string& path, const std::vector<NormComparison>& rows) {
  auto out = open_out(path);
  out << "d_x,d_a,trials,win_rate,win_margin\n";
  for (const NormComparison& r : rows) {
    out << r.context_dim << ',' << r.action_dim << ',' << r.completed << ',' << num(r.win_rate) << ','
        << num(r.win_margin) << '\n';
  }
}

namespace {

nlohmann::json base_meta(const ExperimentConfig& config, const char* command) {
  nlohmann::json meta;
  meta["command"] = command;
  meta["library_version"] = std::string(library_version());
  meta["config_hash"] = config_hash(config);
  nlohmann::json resolved = nlohmann::json::object();
  std::istringstream lines(to_text(config));
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find(" = ");
    resolved[line.substr(0, eq)] = line.substr(eq + 3);
  }
  meta["config"] = resolved;
  return meta;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_trial_files(const ExperimentConfig& config, const CandidateGrids& grids, const TrialResult& r) {
  const std::filesystem::path dir(config.output_dir);
  write_trace_csv((dir / trace_file_name(r.trace.strategy, r.trace.seed)).string(), r.trace);
  if (config.log_duels) write_duels_csv((dir / duels_file_name(r.trace.strategy, r.trace.seed)).string(), r.duels);
  write_policy_csv((dir / policy_file_name(r.trace.strategy, r.trace.seed)).string(), grids, r.policy,
                   r.final_regret);
}

nlohmann::json diagnostics_json(const TrialResult& r) {
  const TrialDiagnostics& d = r.diagnostics;
  return {{"strategy", std::string(to_string(r.trace.strategy))},
          {"seed", r.trace.seed},
          {"final_max_regret", r.final_regret.max_regret},
          {"final_median_regret", r.final_regret.median_regret},
          {"queried_variance_sum", d.queried_variance_sum},
          {"info_gain", d.info_gain},
          {"summability_bound", d.summability_bound},
          {"beta_nondecreasing", d.beta_nondecreasing},
          {"initial_mean_width", d.initial_mean_width},
          {"final_mean_width", d.final_mean_width}};
}

}  // namespace

TrialResult run_single(const ExperimentConfig& config, Strategy strategy, std::uint64_t seed) {
  std::filesystem::create_directories(config.output_dir);
  const auto start = std::chrono::steady_clock::now();
  TrialResult r = run_trial(config, strategy, seed);
  write_trial_files(config, trial_grids(config), r);
  nlohmann::json meta = base_meta(config, "run");
  meta["trials"] = nlohmann::json::array({diagnostics_json(r)});
  meta["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json((std::filesystem::path(config.output_dir) / "meta.json").string(), meta);
  return r;
}

ComparisonReport run_comparison(const ExperimentConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.output_dir);
  const auto start = std::chrono::steady_clock::now();
  const CandidateGrids grids = trial_grids(config);

  struct Job {
    Strategy strategy;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (Strategy s : config.strategies) {
    for (std::uint64_t seed : config.seeds) jobs.push_back({s, seed});
  }
  std::vector<std::optional<TrialResult>> results(jobs.size());
  std::vector<std::optional<TrialFailure>> failures(jobs.size());
  parallel_for(jobs.size(), config.workers, [&](std::size_t k) {
    const Job& job = jobs[k];
    try {
      TrialResult r = run_trial(config, job.strategy, job.seed);
      write_trial_files(config, grids, r);
      results[k] = std::move(r);
    } catch (const NumericalError& e) {
      failures[k] = TrialFailure{job.strategy, job.seed, e.what(), true};
    } catch (const std::exception& e) {
      failures[k] = TrialFailure{job.strategy, job.seed, e.what(), false};
    }
  });

  ComparisonReport report;
  std::vector<RegretTrace> traces;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    if (results[k]) {
      traces.push_back(results[k]->trace);
      report.completed.push_back(std::move(*results[k]));
    } else if (failures[k]) {
      report.failures.push_back(std::move(*failures[k]));
    }
  }
  report.rows = aggregate(traces);
  write_aggregate_csv((std::filesystem::path(config.output_dir) / "aggregate.csv").string(), report.rows);

  nlohmann::json meta = base_meta(config, "compare");
  nlohmann::json trials = nlohmann::json::array();
  for (const TrialResult& r : report.completed) trials.push_back(diagnostics_json(r));
  meta["trials"] = trials;
  nlohmann::json failed = nlohmann::json::array();
  for (const TrialFailure& f : report.failures) {
    failed.push_back({{"strategy", std::string(to_string(f.strategy))}, {"seed", f.seed}, {"error", f.message}});
  }
  meta["failed_trials"] = failed;
  meta["warning_count"] = report.failures.size();
  meta["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json((std::filesystem::path(config.output_dir) / "meta.json").string(), meta);
  return report;
}

TrialResult dump_surfaces(const ExperimentConfig& config, Strategy strategy, std::uint64_t seed) {
  std::filesystem::create_directories(config.output_dir);
  const std::filesystem::path dir(config.output_dir);
  const CandidateGrids grids = trial_grids(config);
  const std::string stem = std::string(to_string(strategy)) + "_" + std::to_string(seed);

  const SurfaceSink sink = [&](const SurfaceDump& d) {
    const std::string suffix = stem + "_t" + std::to_string(d.round) + ".csv";
    {
      auto out = open_out((dir / ("surface_" + suffix)).string());
      out << "context_index,action_index" << point_header("x", grids.contexts.cols())
          << point_header("a", grids.actions.cols()) << ",reward,true_borda,mean,std,lower,upper\n";
      for (Eigen::Index i = 0; i < grids.num_contexts(); ++i) {
        for (Eigen::Index j = 0; j < grids.num_actions(); ++j) {
          std::string line = std::to_string(i) + ',' + std::to_string(j);
          append_point(line, grids.contexts.row(i).transpose());
          append_point(line, grids.actions.row(j).transpose());
          for (double v : {d.reward(i, j), d.truth(i, j), d.mean(i, j), d.stddev(i, j), d.lower(i, j), d.upper(i, j)}) {
            line += ',' + num(v);
          }
          out << line << '\n';
        }
      }
    }
    auto out = open_out((dir / ("contexts_" + suffix)).string());
    out << "context_index" << point_header("x", grids.contexts.cols())
        << ",acquisition,optimistic_value,pessimistic_value,policy_action,regret\n";
    const Eigen::VectorXd optimistic = d.upper.rowwise().maxCoeff();
    const Eigen::VectorXd pessimistic = d.lower.rowwise().maxCoeff();
    for (Eigen::Index i = 0; i < grids.num_contexts(); ++i) {
      std::string line = std::to_string(i);
      append_point(line, grids.contexts.row(i).transpose());
      line += ',' + num(d.acquisition(i)) + ',' + num(optimistic(i)) + ',' + num(pessimistic(i)) + ',' +
              std::to_string(d.policy.action_index[static_cast<std::size_t>(i)]) + ',' + num(d.regret.per_context(i));
      out << line << '\n';
    }
  };

  TrialResult r = run_trial(config, strategy, seed, sink);
  write_trial_files(config, grids, r);
  nlohmann::json meta = base_meta(config, "dump-surfaces");
  meta["trials"] = nlohmann::json::array({diagnostics_json(r)});
  write_json((dir / "meta.json").string(), meta);
  return r;
}

std::vector<NormComparison> run_norm_study(const ExperimentConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.output_dir);
  const auto start = std::chrono::steady_clock::now();
  NormStudyOptions options;
  options.sample_points = config.norm_sample_points;
  options.regularization = config.norm_regularization;
  options.num_features = config.env_features;
  options.lengthscale = config.env_lengthscale;
  options.kernel_lengthscale = config.norm_kernel_lengthscale;
  options.shared_opponents = config.norm_shared_opponents;
  options.link = config.link;
  options.workers = config.workers;

  std::vector<NormComparison> rows;
  for (std::size_t k = 0; k < config.norm_rows.size(); ++k) {
    const NormRow& row = config.norm_rows[k];
    rows.push_back(compare_norms(row.context_dim, row.action_dim, config.norm_trials, config.norm_mc_samples,
                                 derive_seed(config.norm_seed, k), options));
  }
  const std::filesystem::path dir(config.output_dir);
  write_norms_csv((dir / "norms.csv").string(), rows);

  nlohmann::json meta = base_meta(config, "norms");
  nlohmann::json failed = nlohmann::json::array();
  for (const NormComparison& r : rows) {
    for (const NormTrialFailure& f : r.failures) {
      failed.push_back({{"d_x", r.context_dim}, {"d_a", r.action_dim}, {"trial", f.trial}, {"seed", f.seed},
                        {"error", f.message}});
    }
  }
  meta["failed_trials"] = failed;
  meta["norm_kernel"] = "se";
  meta["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json((dir / "meta.json").string(), meta);
  return rows;
}

}  // namespace borda
