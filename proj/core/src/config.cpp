#include "borda/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace borda {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("config: '" + key + "' expects a nonnegative integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: '" + key + "' expects true/false, got '" + v + "'");
}

std::string fmt(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& render) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += render(items[i]);
  }
  return out;
}

template <typename F>
auto rethrow_as_config(const std::string& key, F&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw ConfigError("config: '" + key + "': " + e.what());
  }
}

struct Field {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define BORDA_NUM_FIELD(name, member, conv)                                                  \
  Field {                                                                                    \
    name, [](ExperimentConfig& c, const std::string& v) { c.member = conv(name, v); },       \
        [](const ExperimentConfig& c) { return fmt(static_cast<double>(c.member)); }         \
  }
#define BORDA_INT_FIELD(name, member, type)                                                               \
  Field {                                                                                                 \
    name, [](ExperimentConfig& c, const std::string& v) { c.member = static_cast<type>(to_uint(name, v)); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.member); }                                \
  }
#define BORDA_BOOL_FIELD(name, member)                                                  \
  Field {                                                                               \
    name, [](ExperimentConfig& c, const std::string& v) { c.member = to_bool(name, v); }, \
        [](const ExperimentConfig& c) { return std::string(c.member ? "true" : "false"); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      BORDA_INT_FIELD("context_dim", context_dim, Eigen::Index),
      BORDA_INT_FIELD("action_dim", action_dim, Eigen::Index),
      BORDA_INT_FIELD("env_features", env_features, Eigen::Index),
      BORDA_NUM_FIELD("env_lengthscale", env_lengthscale, to_double),
      Field{"link", [](ExperimentConfig& c, const std::string& v) { c.link = rethrow_as_config("link", [&] { return parse_link(v); }); },
            [](const ExperimentConfig& c) { return std::string(to_string(c.link)); }},
      Field{"model_kernel",
            [](ExperimentConfig& c, const std::string& v) {
              c.model_kernel = rethrow_as_config("model_kernel", [&] { return parse_kernel_family(v); });
            },
            [](const ExperimentConfig& c) { return std::string(to_string(c.model_kernel)); }},
      Field{"model_lengthscale",
            [](ExperimentConfig& c, const std::string& v) {
              c.model_lengthscales.clear();
              for (const auto& item : split(v, ',')) c.model_lengthscales.push_back(to_double("model_lengthscale", item));
            },
            [](const ExperimentConfig& c) { return join(c.model_lengthscales, fmt); }},
      BORDA_NUM_FIELD("model_signal_variance", model_signal_variance, to_double),
      BORDA_NUM_FIELD("model_jitter", model_jitter, to_double),
      BORDA_NUM_FIELD("noise_variance", noise_variance, to_double),
      BORDA_NUM_FIELD("rkhs_bound", rkhs_bound, to_double),
      BORDA_NUM_FIELD("delta", delta, to_double),
      Field{"beta_mode",
            [](ExperimentConfig& c, const std::string& v) {
              c.beta_mode = rethrow_as_config("beta_mode", [&] { return parse_beta_mode(v); });
            },
            [](const ExperimentConfig& c) { return std::string(to_string(c.beta_mode)); }},
      BORDA_NUM_FIELD("fixed_beta", fixed_beta, to_double),
      BORDA_INT_FIELD("n0", n0, std::size_t),
      BORDA_INT_FIELD("T", horizon, std::size_t),
      BORDA_INT_FIELD("grid_per_dim", grid_per_dim, Eigen::Index),
      BORDA_INT_FIELD("sobol_size", sobol_size, Eigen::Index),
      BORDA_INT_FIELD("grid_seed", grid_seed, std::uint64_t),
      Field{"strategies",
            [](ExperimentConfig& c, const std::string& v) {
              c.strategies.clear();
              for (const auto& item : split(v, ','))
                c.strategies.push_back(rethrow_as_config("strategies", [&] { return parse_strategy(item); }));
            },
            [](const ExperimentConfig& c) {
              return join(c.strategies, [](Strategy s) { return std::string(to_string(s)); });
            }},
      Field{"seeds", [](ExperimentConfig& c, const std::string& v) { c.seeds = parse_seed_list(v); },
            [](const ExperimentConfig& c) {
              return join(c.seeds, [](std::uint64_t s) { return std::to_string(s); });
            }},
      BORDA_INT_FIELD("eval_every", eval_every, std::size_t),
      Field{"dump_rounds",
            [](ExperimentConfig& c, const std::string& v) {
              c.dump_rounds.clear();
              for (const auto& item : split(v, ',')) c.dump_rounds.push_back(to_uint("dump_rounds", item));
            },
            [](const ExperimentConfig& c) {
              return join(c.dump_rounds, [](std::size_t r) { return std::to_string(r); });
            }},
      BORDA_BOOL_FIELD("track_coverage", track_coverage),
      BORDA_BOOL_FIELD("record_timing", record_timing),
      BORDA_BOOL_FIELD("log_duels", log_duels),
      BORDA_INT_FIELD("workers", workers, std::size_t),
      Field{"output_dir", [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; },
            [](const ExperimentConfig& c) { return c.output_dir; }},
      Field{"norm_rows",
            [](ExperimentConfig& c, const std::string& v) {
              c.norm_rows.clear();
              for (const auto& item : split(v, ',')) {
                const auto x = item.find('x');
                if (x == std::string::npos) throw ConfigError("config: norm_rows entries look like 1x3, got '" + item + "'");
                c.norm_rows.push_back({static_cast<Eigen::Index>(to_uint("norm_rows", item.substr(0, x))),
                                       static_cast<Eigen::Index>(to_uint("norm_rows", item.substr(x + 1)))});
              }
            },
            [](const ExperimentConfig& c) {
              return join(c.norm_rows, [](const NormRow& r) {
                return std::to_string(r.context_dim) + "x" + std::to_string(r.action_dim);
              });
            }},
      BORDA_INT_FIELD("norm_trials", norm_trials, int),
      BORDA_INT_FIELD("norm_mc_samples", norm_mc_samples, int),
      BORDA_INT_FIELD("norm_sample_points", norm_sample_points, Eigen::Index),
      BORDA_NUM_FIELD("norm_regularization", norm_regularization, to_double),
      BORDA_NUM_FIELD("norm_kernel_lengthscale", norm_kernel_lengthscale, to_double),
      BORDA_BOOL_FIELD("norm_shared_opponents", norm_shared_opponents),
      BORDA_INT_FIELD("norm_seed", norm_seed, std::uint64_t),
  };
  return table;
}

#undef BORDA_NUM_FIELD
#undef BORDA_INT_FIELD
#undef BORDA_BOOL_FIELD

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& item : split(text, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(to_uint("seeds", item));
      continue;
    }
    const std::uint64_t lo = to_uint("seeds", trim(item.substr(0, dash)));
    const std::uint64_t hi = to_uint("seeds", trim(item.substr(dash + 1)));
    if (hi < lo) throw ConfigError("config: seed range '" + item + "' is reversed");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  return seeds;
}

void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value) {
  for (const Field& f : fields()) {
    if (key == f.key) {
      f.set(config, value);
      return;
    }
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    try {
      apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  base.validate();
  return base;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_text(const ExperimentConfig& config) {
  std::string out;
  for (const Field& f : fields()) {
    out += f.key;
    out += " = ";
    out += f.get(config);
    out += "\n";
  }
  return out;
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : to_text(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (context_dim < 0) fail("context_dim must be >= 0");
  if (action_dim < 1) fail("action_dim must be >= 1");
  if (n0 < 1) fail("n0 must be >= 1");
  if (n0 > horizon) fail("n0 must not exceed T");
  if (seeds.empty()) fail("seeds must be nonempty");
  if (strategies.empty()) fail("strategies must be nonempty");
  if (eval_every < 1) fail("eval_every must be >= 1");
  if (grid_per_dim < 1) fail("grid_per_dim must be >= 1");
  if (workers < 1) fail("workers must be >= 1");
  if (model_lengthscales.size() != 1 &&
      static_cast<Eigen::Index>(model_lengthscales.size()) != context_dim + action_dim) {
    fail("model_lengthscale needs one value or one per joint dimension");
  }
  if (norm_trials < 1) fail("norm_trials must be >= 1");
  if (norm_mc_samples < 1) fail("norm_mc_samples must be >= 1");
  if (norm_sample_points < 2) fail("norm_sample_points must be >= 2");
  if (!(norm_regularization > 0.0)) fail("norm_regularization must be positive");
  for (const NormRow& r : norm_rows) {
    if (r.action_dim < 1) fail("norm_rows need action dimension >= 1");
  }
  rethrow_as_config("model", [&] {
    model_kernel_spec();
    beta_schedule().validate();
    env_spec(0).validate();
    if (!(noise_variance > 0.0)) throw InvalidInput("noise_variance must be positive");
    return 0;
  });
}

KernelSpec ExperimentConfig::model_kernel_spec() const {
  const Eigen::Index dim = context_dim + action_dim;
  KernelSpec spec;
  spec.family = model_kernel;
  spec.lengthscales = model_lengthscales.size() == 1
                          ? Eigen::VectorXd::Constant(dim, model_lengthscales.front())
                          : Eigen::Map<const Eigen::VectorXd>(model_lengthscales.data(), dim).eval();
  spec.signal_variance = model_signal_variance;
  spec.jitter = model_jitter < 0.0 ? 1e-6 * model_signal_variance : model_jitter;
  spec.validate(dim);
  return spec;
}

BetaSchedule ExperimentConfig::beta_schedule() const {
  BetaSchedule s;
  s.rkhs_bound = rkhs_bound;
  s.delta = delta;
  s.mode = beta_mode;
  s.fixed_beta = fixed_beta;
  s.linear_dim = context_dim + action_dim;
  return s;
}

EnvSpec ExperimentConfig::env_spec(std::uint64_t seed) const {
  return EnvSpec{context_dim, action_dim, env_features, env_lengthscale, link, seed};
}

}  // namespace borda
