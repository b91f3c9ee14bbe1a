// Command-line front end for the experiment harness.
//
//   borda run            one (strategy, seed) trial
//   borda compare        every strategy x seed, plus aggregate.csv
//   borda norms          reward vs Borda RKHS-norm table
//   borda dump-surfaces  grid surfaces at the configured dump rounds
//
// Exit codes: 0 ok, 1 bad config or arguments, 2 numerical failure,
// 3 some trials of a sweep failed.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "borda/config.hpp"
#include "borda/errors.hpp"
#include "borda/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNumericalError = 2;
constexpr int kPartialFailure = 3;

struct Options {
  std::string config_path;
  std::string strategy;
  std::string seed;
  std::string out;
  std::size_t workers = 0;
  std::vector<std::string> settings;
};

borda::ExperimentConfig resolve(const Options& opt) {
  borda::ExperimentConfig config = opt.config_path.empty() ? borda::ExperimentConfig{} : borda::load_config(opt.config_path);
  for (const std::string& s : opt.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw borda::ConfigError("override '" + s + "' is not key=value");
    borda::apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
  }
  if (!opt.strategy.empty()) borda::apply_setting(config, "strategies", opt.strategy);
  if (!opt.seed.empty()) borda::apply_setting(config, "seeds", opt.seed);
  if (!opt.out.empty()) config.output_dir = opt.out;
  if (opt.workers > 0) config.workers = opt.workers;
  config.validate();
  return config;
}

void print_final(const borda::TrialResult& r) {
  std::printf("%s seed %llu: max regret %.6g, median regret %.6g\n", std::string(borda::to_string(r.trace.strategy)).c_str(),
              static_cast<unsigned long long>(r.trace.seed), r.final_regret.max_regret, r.final_regret.median_regret);
}

int cmd_single(const Options& opt, bool dump) {
  const borda::ExperimentConfig config = resolve(opt);
  if (config.strategies.size() != 1 || config.seeds.size() != 1) {
    throw borda::ConfigError("this command takes exactly one --strategy and one --seed");
  }
  const auto r = dump ? borda::dump_surfaces(config, config.strategies.front(), config.seeds.front())
                      : borda::run_single(config, config.strategies.front(), config.seeds.front());
  print_final(r);
  return kOk;
}

int cmd_compare(const Options& opt) {
  const borda::ExperimentConfig config = resolve(opt);
  const borda::ComparisonReport report = borda::run_comparison(config);
  for (const borda::AggregateRow& row : report.rows) {
    if (row.round != config.horizon) continue;
    std::printf("%-14s T=%zu  max %.4f +- %.4f  median %.4f +- %.4f  (%zu seeds)\n",
                std::string(borda::to_string(row.strategy)).c_str(), row.round, row.mean_max, row.se_max,
                row.mean_median, row.se_median, row.seeds);
  }
  for (const borda::TrialFailure& f : report.failures) {
    std::fprintf(stderr, "failed: %s seed %llu: %s\n", std::string(borda::to_string(f.strategy)).c_str(),
                 static_cast<unsigned long long>(f.seed), f.message.c_str());
  }
  if (report.failures.empty()) return kOk;
  if (report.completed.empty()) {
    bool all_numeric = true;
    for (const auto& f : report.failures) all_numeric = all_numeric && f.numerical;
    return all_numeric ? kNumericalError : kPartialFailure;
  }
  return kPartialFailure;
}

int cmd_norms(const Options& opt) {
  borda::ExperimentConfig config = resolve(opt);
  if (!opt.seed.empty()) config.norm_seed = config.seeds.front();
  const auto rows = borda::run_norm_study(config);
  std::printf("d_x d_a trials win_rate win_margin\n");
  bool any_failed = false;
  for (const borda::NormComparison& r : rows) {
    std::printf("%3ld %3ld %6d %8.3f %10.3f\n", static_cast<long>(r.context_dim), static_cast<long>(r.action_dim),
                r.completed, r.win_rate, r.win_margin);
    any_failed = any_failed || !r.failures.empty();
  }
  return any_failed ? kPartialFailure : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active context/action selection for offline contextual dueling bandits"};
  app.set_version_flag("--version", std::string(borda::library_version()));
  app.require_subcommand(1);

  Options opt;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--strategy", opt.strategy, "borda-ae, borda-ucb, borda-uniform (comma list for compare)");
    sub->add_option("--seed", opt.seed, "seed or seed list such as 0-4,7");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--workers", opt.workers, "worker threads");
    sub->add_option("--set", opt.settings, "override a config key, key=value (repeatable)");
  };
  auto* run = app.add_subcommand("run", "run one trial");
  auto* compare = app.add_subcommand("compare", "run every strategy over every seed");
  auto* norms = app.add_subcommand("norms", "RKHS norms of rewards vs their Borda functions");
  auto* dump = app.add_subcommand("dump-surfaces", "write grid surfaces for one trial");
  for (auto* sub : {run, compare, norms, dump}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (run->parsed()) return cmd_single(opt, false);
    if (compare->parsed()) return cmd_compare(opt);
    if (norms->parsed()) return cmd_norms(opt);
    return cmd_single(opt, true);
  } catch (const borda::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumericalError;
  } catch (const borda::InvalidInput& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  }
}
