#include "ccucp/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccucp/annealer.hpp"
#include "ccucp/encoding.hpp"
#include "ccucp/errors.hpp"
#include "ccucp/instance.hpp"
#include "ccucp/qubo.hpp"
#include "ccucp/reference_solver.hpp"
#include "ccucp/rng.hpp"
#include "ccucp/sampler.hpp"
#include "ccucp/scenario_model.hpp"
#include "ccucp/tuner.hpp"

namespace ccucp {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << content;
  if (!out.good()) throw ValidationError("failed writing file: " + path);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t pos = 0;
      values.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(what + " has a non-numeric entry: " + item);
    }
  }
  return values;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> values;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t pos = 0;
      values.push_back(std::stoull(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("seed list has a non-numeric entry: " + item);
    }
  }
  return values;
}

// --- shared option bundles ------------------------------------------------

struct InstanceOpts {
  std::string builtin;
  std::string path;
  std::string regime = "moderate";
  CLI::Option* regime_opt = nullptr;
};

void add_instance_opts(CLI::App* sub, InstanceOpts& o) {
  auto* b = sub->add_option("--builtin", o.builtin,
                            "use a built-in system: deterministic | stochastic");
  auto* p = sub->add_option("--instance", o.path, "instance JSON file");
  b->excludes(p);
  o.regime_opt = sub->add_option(
      "--regime", o.regime, "correlation regime: none | moderate | strong (default moderate)");
}

UcpInstance resolve_instance(const InstanceOpts& o, RunManifest& man, std::string* regime_label) {
  std::string label = "custom";
  UcpInstance inst;
  if (!o.path.empty()) {
    man.add_input(o.path);
    man.add("instance", o.path);
    inst = load_instance(o.path);
    if (o.regime_opt != nullptr && o.regime_opt->count() > 0) {
      if (!inst.is_stochastic())
        throw ValidationError("--regime applies only to gaussian-demand instances");
      std::get<GaussianDemand>(inst.demand).corr = correlation_matrix(o.regime);
      label = o.regime;
    }
  } else if (o.builtin == "deterministic") {
    man.add("builtin", o.builtin);
    inst = builtin_deterministic_instance();
  } else if (o.builtin == "stochastic") {
    man.add("builtin", o.builtin);
    inst = builtin_stochastic_instance(o.regime);  // validates the regime name
    label = o.regime;
  } else if (o.builtin.empty()) {
    throw ValidationError("select an instance with --builtin or --instance");
  } else {
    throw ValidationError("unknown builtin '" + o.builtin + "' (deterministic, stochastic)");
  }
  if (inst.is_stochastic()) man.add("regime", label);
  if (regime_label != nullptr) *regime_label = label;
  return inst;
}

struct ScenarioOpts {
  std::string path;
  int n = 100;
};

void add_scenario_opts(CLI::App* sub, ScenarioOpts& o, int default_n) {
  o.n = default_n;
  sub->add_option("--scenarios", o.path, "scenario CSV to load instead of sampling");
  sub->add_option("--n", o.n, "number of scenarios to sample")->check(CLI::PositiveNumber);
}

ScenarioSet resolve_scenarios(const UcpInstance& inst, const ScenarioOpts& o, std::uint64_t seed,
                              const std::string& regime_label, RunManifest& man) {
  if (!o.path.empty()) {
    man.add_input(o.path);
    man.add("scenarios", o.path);
    ScenarioSet set = load_scenarios(o.path);
    if (set.horizon != inst.horizon)
      throw ValidationError("scenario horizon does not match the instance");
    return set;
  }
  man.add("n", o.n);
  return sample_scenarios(inst, o.n, seed, regime_label);
}

struct WeightOpts {
  std::string file;
  bool use_default = false;
};

void add_weight_opts(CLI::App* sub, WeightOpts& o) {
  auto* f = sub->add_option("--weights-file", o.file, "penalty weights JSON file");
  auto* d = sub->add_flag("--default-weights", o.use_default,
                          "use the built-in reference weights (also the fallback)");
  f->excludes(d);
}

PenaltyWeights resolve_weights(const WeightOpts& o, RunManifest& man) {
  if (!o.file.empty()) {
    man.add_input(o.file);
    man.add("weights", o.file);
    return PenaltyWeights::from_json(read_file(o.file));
  }
  man.add("weights", "default");
  return PenaltyWeights::tuned_reference();
}

void check_p_level(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw ValidationError("--p-level must lie in (0, 1]");
}

// Decode every sample, track the best feasible one, optionally write the
// per-sample cost/feasibility table.
void report_decoded_samples(const SampleSet& set, const UcpInstance& inst, const Layout& layout,
                            const ScenarioSet* scen, double p_level,
                            const std::string& histogram_path, const RunManifest& man) {
  std::ostringstream csv;
  csv << "# " << man.comment() << "\nread,energy,cost,feasible\n";
  std::optional<FeasibleBest> best;
  int feasible_count = 0;
  for (const auto& s : set.samples) {
    Solution sol = decode_solution(inst, layout, s.bits);
    const FeasibilityReport rep = check_feasible(inst, sol, scen, p_level);
    if (rep.feasible) {
      ++feasible_count;
      if (!best || sol.objective < best->objective)
        best = FeasibleBest{s.read_index, sol.objective, sol};
    }
    csv << s.read_index << ',' << fmt10(s.energy) << ',' << fmt10(sol.objective) << ','
        << (rep.feasible ? 1 : 0) << "\n";
  }
  if (!histogram_path.empty()) write_file(histogram_path, csv.str());
  const double ratio =
      static_cast<double>(feasible_count) / static_cast<double>(set.samples.size());
  std::printf("feasible_ratio=%s (%d of %zu)\n", fmt10(ratio).c_str(), feasible_count,
              set.samples.size());
  if (best) {
    std::printf("best_feasible cost=%s read=%d\n", fmt10(best->objective).c_str(),
                best->read_index);
  } else {
    std::printf("best_feasible none\n");
  }
}

// --- subcommands ------------------------------------------------------------

int cmd_sample(const InstanceOpts& inst_opts, int n, std::uint64_t seed,
               const std::string& out) {
  RunManifest man;
  man.command = "sample";
  std::string label;
  const UcpInstance inst = resolve_instance(inst_opts, man, &label);
  if (!inst.is_stochastic())
    throw ValidationError("cannot sample scenarios for a fixed-demand instance");
  man.add("n", n);
  man.add("seed", seed);
  man.add("out", out);
  const ScenarioSet set = sample_scenarios(inst, n, seed, label);
  save_scenarios(set, out, man.comment());
  std::printf("%s\n", man.to_json().c_str());
  std::printf("wrote %d scenarios x %d periods to %s\n", set.n, set.horizon, out.c_str());
  return 0;
}

int cmd_solve(const InstanceOpts& inst_opts, const ScenarioOpts& scen_opts, bool greedy,
              double p_level, std::uint64_t seed, double time_budget, const std::string& out) {
  RunManifest man;
  man.command = "solve";
  std::string label;
  const UcpInstance inst = resolve_instance(inst_opts, man, &label);
  man.add("method", greedy ? "greedy" : "exact");
  man.add("seed", seed);
  man.add("out", out);
  SolverLimits limits;
  limits.time_budget_seconds = time_budget;
  man.add("time_budget_seconds", time_budget);

  Solution sol;
  FeasibilityReport report;
  std::optional<ScenarioSet> scen;
  if (inst.is_stochastic()) {
    check_p_level(p_level);
    man.add("p_level", p_level);
    scen = resolve_scenarios(inst, scen_opts, seed, label, man);
    if (greedy) {
      sol = solve_stochastic_greedy(inst, *scen, p_level);
    } else {
      try {
        sol = solve_stochastic_exact(inst, *scen, p_level, limits);
      } catch (const LimitError& e) {
        throw LimitError(std::string(e.what()) + " — rerun with --greedy");
      }
    }
    report = check_feasible(inst, sol, &*scen, p_level);
  } else {
    if (greedy) throw ValidationError("--greedy applies only to gaussian-demand instances");
    sol = solve_deterministic(inst, limits);
    report = check_feasible(inst, sol);
  }

  json j = json::parse(solution_to_json(sol));
  j["manifest"] = man.hash_hex();
  j["feasibility"] = json::parse(report.to_json());
  write_file(out, j.dump(2) + "\n");
  std::printf("%s\n", man.to_json().c_str());
  std::printf("objective=%s feasible=%d\n", fmt10(sol.objective).c_str(),
              report.feasible ? 1 : 0);
  return 0;
}

int cmd_sweep_p(const std::string& p_grid_text, int n, const std::string& seeds_text,
                const std::string& regimes_text, double time_budget, const std::string& out,
                bool gnuplot) {
  const std::vector<double> p_grid = parse_double_list(p_grid_text, "--p-grid");
  if (p_grid.empty()) throw ValidationError("--p-grid must contain at least one value");
  for (double p : p_grid) check_p_level(p);
  const std::vector<std::uint64_t> seeds = parse_seed_list(seeds_text);
  if (seeds.empty()) throw ValidationError("--seeds must contain at least one value");
  const std::vector<std::string> regimes = split_list(regimes_text);
  if (regimes.empty()) throw ValidationError("--regimes must contain at least one value");
  for (const auto& r : regimes) correlation_matrix(r);  // validates names

  RunManifest man;
  man.command = "sweep-p";
  man.add("p_grid", p_grid_text);
  man.add("n", n);
  man.add("seeds", seeds_text);
  man.add("regimes", regimes_text);
  man.add("time_budget_seconds", time_budget);
  man.add("out", out);

  SolverLimits limits;
  limits.time_budget_seconds = time_budget;
  std::ostringstream csv;
  csv << "# " << man.comment() << "\nregime,p,seed,cost\n";
  for (const auto& regime : regimes) {
    const UcpInstance inst = builtin_stochastic_instance(regime);
    for (std::uint64_t seed : seeds) {
      // One scenario set per (regime, seed), re-solved across the whole grid,
      // so rows within the pair are comparable.
      const ScenarioSet set = sample_scenarios(inst, n, seed, regime);
      for (double p : p_grid) {
        const Solution sol = (n <= limits.max_exact_scenarios)
                                 ? solve_stochastic_exact(inst, set, p, limits)
                                 : solve_stochastic_greedy(inst, set, p);
        csv << regime << ',' << fmt10(p) << ',' << seed << ',' << fmt10(sol.objective) << "\n";
      }
    }
  }
  write_file(out, csv.str());
  if (gnuplot) {
    std::ostringstream gp;
    gp << "# " << man.comment() << "\n";
    gp << "set datafile separator \",\"\n";
    gp << "set xlabel \"reliability level p\"\n";
    gp << "set ylabel \"schedule cost ($)\"\n";
    gp << "set key top left\n";
    gp << "plot \\\n";
    for (std::size_t i = 0; i < regimes.size(); ++i) {
      gp << "  \"" << out << "\" every ::1 using 2:(strcol(1) eq \"" << regimes[i]
         << "\" ? column(4) : 1/0) title \"" << regimes[i] << "\" with points pt "
         << (4 + i) << (i + 1 < regimes.size() ? ", \\\n" : "\n");
    }
    write_file(out + ".gp", gp.str());
  }
  std::printf("%s\n", man.to_json().c_str());
  std::printf("wrote %zu rows to %s\n", p_grid.size() * seeds.size() * regimes.size(),
              out.c_str());
  return 0;
}

int cmd_compile(const InstanceOpts& inst_opts, const ScenarioOpts& scen_opts,
                const WeightOpts& weight_opts, double p_level, std::uint64_t seed,
                const std::string& out, const std::string& stats_path) {
  RunManifest man;
  man.command = "compile";
  std::string label;
  const UcpInstance inst = resolve_instance(inst_opts, man, &label);
  const PenaltyWeights weights = resolve_weights(weight_opts, man);
  man.add("seed", seed);
  man.add("out", out);

  std::optional<ScenarioSet> scen;
  Layout layout;
  if (inst.is_stochastic()) {
    check_p_level(p_level);
    man.add("p_level", p_level);
    scen = resolve_scenarios(inst, scen_opts, seed, label, man);
    layout = make_layout(inst, *scen, p_level);
  } else {
    layout = make_layout(inst);
  }
  const QuboModel model =
      compile_qubo(inst, layout, weights, scen ? &*scen : nullptr, p_level);
  export_qubo(model, out, man.comment());

  if (!stats_path.empty()) {
    std::map<int, int> degree;
    for (int i = 0; i < model.num_vars; ++i) degree[i] = 0;
    std::map<int, int> var_degrees;
    for (const auto& [key, v] : model.quadratic) {
      (void)v;
      ++degree[key.first];
      ++degree[key.second];
    }
    for (const auto& [var, d] : degree) ++var_degrees[d];
    json hist = json::array();
    for (const auto& [d, count] : var_degrees) hist.push_back({d, count});

    json stats;
    stats["manifest"] = man.hash_hex();
    stats["num_vars"] = model.num_vars;
    stats["num_linear"] = model.linear.size();
    stats["num_couplings"] = model.num_couplings();
    stats["offset"] = model.offset;
    stats["degree_histogram"] = hist;
    // Known sizes for the built-in configurations, for drift checks.
    const bool builtin_det = inst_opts.builtin == "deterministic";
    const bool builtin_stoch_ref = inst_opts.builtin == "stochastic" && scen && scen->n == 10 &&
                                   std::abs(p_level - 0.9) < 1e-12;
    if (builtin_det || builtin_stoch_ref) {
      const int ref_vars = builtin_det ? 291 : 809;
      const int ref_couplings = builtin_det ? 5651 : 26781;
      json ref;
      ref["num_vars"] = ref_vars;
      ref["num_couplings"] = ref_couplings;
      ref["coupling_deviation_pct"] =
          (static_cast<double>(model.num_couplings()) - ref_couplings) / ref_couplings * 100.0;
      stats["reference"] = ref;
    }
    write_file(stats_path, stats.dump(2) + "\n");
  }
  std::printf("%s\n", man.to_json().c_str());
  std::printf("variables=%d couplings=%zu\n", model.num_vars, model.num_couplings());
  return 0;
}

int cmd_anneal(const std::string& qubo_path, const InstanceOpts& inst_opts,
               const ScenarioOpts& scen_opts, const WeightOpts& weight_opts, double p_level,
               AnnealConfig anneal_cfg, const std::string& out, const std::string& histogram) {
  RunManifest man;
  man.command = "anneal";

  const bool have_instance = !inst_opts.builtin.empty() || !inst_opts.path.empty();
  if (qubo_path.empty() && !have_instance)
    throw ValidationError("give --qubo or an instance (--builtin / --instance)");

  QuboModel model;
  std::optional<UcpInstance> inst;
  std::optional<ScenarioSet> scen;
  std::optional<Layout> layout;
  std::string label;
  if (have_instance) {
    inst = resolve_instance(inst_opts, man, &label);
    if (inst->is_stochastic()) {
      check_p_level(p_level);
      man.add("p_level", p_level);
      scen = resolve_scenarios(*inst, scen_opts, anneal_cfg.seed, label, man);
      layout = make_layout(*inst, *scen, p_level);
    } else {
      layout = make_layout(*inst);
    }
  }
  if (!qubo_path.empty()) {
    man.add_input(qubo_path);
    man.add("qubo", qubo_path);
    model = import_qubo(qubo_path);
    if (layout && layout->num_vars != model.num_vars)
      throw ValidationError("instance layout has " + std::to_string(layout->num_vars) +
                            " variables but the imported model has " +
                            std::to_string(model.num_vars));
  } else {
    const PenaltyWeights weights = resolve_weights(weight_opts, man);
    model = compile_qubo(*inst, *layout, weights, scen ? &*scen : nullptr, p_level);
  }
  if (!histogram.empty() && !layout)
    throw ValidationError("--histogram needs an instance to decode against");

  man.add("reads", anneal_cfg.reads);
  man.add("sweeps", anneal_cfg.sweeps);
  man.add("beta_start", anneal_cfg.beta_start);
  man.add("beta_end", anneal_cfg.beta_end);
  man.add("init_density", anneal_cfg.init_density);
  man.add("track_best", anneal_cfg.track_best);
  man.add("seed", anneal_cfg.seed);
  man.add("out", out);

  const SampleSet set = anneal(model, anneal_cfg);

  std::ostringstream jsonl;
  jsonl << man.to_json() << "\n";
  for (const auto& s : set.samples) {
    std::string bits(s.bits.size(), '0');
    for (std::size_t i = 0; i < s.bits.size(); ++i)
      if (s.bits[i]) bits[i] = '1';
    json line = {{"read", s.read_index}, {"energy", s.energy}, {"bits", bits}};
    jsonl << line.dump() << "\n";
  }
  write_file(out, jsonl.str());

  std::printf("%s\n", man.to_json().c_str());
  const AnnealSample& best = set.best();
  std::printf("best_energy=%s read=%d\n", fmt10(best.energy).c_str(), best.read_index);
  if (layout)
    report_decoded_samples(set, *inst, *layout, scen ? &*scen : nullptr, p_level, histogram,
                           man);
  return 0;
}

int cmd_tune(const InstanceOpts& inst_opts, const ScenarioOpts& scen_opts, double p_level,
             const std::string& config_path, TunerConfig cfg, const CLI::App* sub,
             const std::string& trace_path, const std::string& out) {
  RunManifest man;
  man.command = "tune";
  std::string label;
  const UcpInstance inst = resolve_instance(inst_opts, man, &label);

  if (!config_path.empty()) {
    man.add_input(config_path);
    man.add("config", config_path);
    json j;
    try {
      j = json::parse(read_file(config_path));
    } catch (const json::exception& e) {
      throw ValidationError(std::string("bad tuner config JSON: ") + e.what());
    }
    cfg.iterations = j.value("iterations", cfg.iterations);
    cfg.step_amplitude = j.value("amplitude", cfg.step_amplitude);
    cfg.steepness = j.value("steepness", cfg.steepness);
    cfg.midpoint = j.value("midpoint", cfg.midpoint);
    cfg.anneal.reads = j.value("reads", cfg.anneal.reads);
    cfg.anneal.sweeps = j.value("sweeps", cfg.anneal.sweeps);
    cfg.anneal.track_best = j.value("track_best", cfg.anneal.track_best);
    if (j.contains("initial_weights"))
      cfg.initial = PenaltyWeights::from_json(j["initial_weights"].dump());
  }
  // Explicit flags beat the config file.
  auto overridden = [&](const std::string& name) { return sub->count(name) > 0; };
  if (overridden("--iterations")) cfg.iterations = sub->get_option("--iterations")->as<int>();
  if (overridden("--reads")) cfg.anneal.reads = sub->get_option("--reads")->as<int>();
  if (overridden("--sweeps")) cfg.anneal.sweeps = sub->get_option("--sweeps")->as<int>();
  if (overridden("--amplitude"))
    cfg.step_amplitude = sub->get_option("--amplitude")->as<double>();
  if (overridden("--steepness")) cfg.steepness = sub->get_option("--steepness")->as<double>();
  if (overridden("--midpoint")) cfg.midpoint = sub->get_option("--midpoint")->as<double>();

  man.add("iterations", cfg.iterations);
  man.add("amplitude", cfg.step_amplitude);
  man.add("steepness", cfg.steepness);
  man.add("midpoint", cfg.midpoint);
  man.add("reads", cfg.anneal.reads);
  man.add("sweeps", cfg.anneal.sweeps);
  man.add("seed", cfg.seed);
  man.add("trace", trace_path);
  man.add("out", out);

  std::optional<ScenarioSet> scen;
  Layout layout;
  if (inst.is_stochastic()) {
    check_p_level(p_level);
    man.add("p_level", p_level);
    scen = resolve_scenarios(inst, scen_opts, cfg.seed, label, man);
    layout = make_layout(inst, *scen, p_level);
  } else {
    layout = make_layout(inst);
  }

  const TunerResult result = tune_weights(inst, layout, scen ? &*scen : nullptr, p_level, cfg);
  write_trace_csv(result, trace_path, man.comment());
  json weights = json::parse(result.weights.to_json());
  weights["manifest"] = man.hash_hex();
  weights["stop_reason"] = tuner_stop_name(result.reason);
  weights["iterations_run"] = result.iterations_run;
  write_file(out, weights.dump(2) + "\n");

  std::printf("%s\n", man.to_json().c_str());
  std::printf("stop_reason=%s iterations=%d\n", tuner_stop_name(result.reason),
              result.iterations_run);
  if (!result.trace.empty()) {
    const auto& last = result.trace.back();
    std::printf("joint_ratio=%s best_energy=%s\n", fmt10(last.joint_ratio).c_str(),
                fmt10(last.best_energy).c_str());
  }
  return 0;
}

}  // namespace

// --- manifest ---------------------------------------------------------------

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void RunManifest::add(const std::string& key, const std::string& value) {
  config.emplace_back(key, value);
}
void RunManifest::add(const std::string& key, const char* value) {
  config.emplace_back(key, std::string(value));
}
void RunManifest::add(const std::string& key, std::int64_t value) {
  config.emplace_back(key, std::to_string(value));
}
void RunManifest::add(const std::string& key, std::uint64_t value) {
  config.emplace_back(key, std::to_string(value));
}
void RunManifest::add(const std::string& key, int value) {
  config.emplace_back(key, std::to_string(value));
}
void RunManifest::add(const std::string& key, double value) { config.emplace_back(key, fmt(value)); }
void RunManifest::add(const std::string& key, bool value) {
  config.emplace_back(key, value ? "true" : "false");
}

void RunManifest::add_input(const std::string& path) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(read_file(path))));
  input_hashes[path] = buf;
}

std::uint64_t RunManifest::hash() const {
  std::string canon = std::string(kToolVersion) + "\n" + command + "\n";
  for (const auto& [k, v] : config) canon += k + "=" + v + "\n";
  for (const auto& [k, v] : input_hashes) canon += k + ":" + v + "\n";
  return fnv1a64(canon);
}

std::string RunManifest::hash_hex() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

std::string RunManifest::comment() const { return "manifest: " + hash_hex(); }

std::string RunManifest::to_json() const {
  ordered_json j;
  j["manifest"] = hash_hex();
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  j["config"] = cfg;
  ordered_json inputs = ordered_json::object();
  for (const auto& [k, v] : input_hashes) inputs[k] = v;
  j["input_hashes"] = inputs;
  return j.dump();
}

// --- entry point --------------------------------------------------------------

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"chance-constrained unit commitment: sampling, exact solving, QUBO compilation,"
               " annealing and penalty tuning"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  int exit_code = 0;

  // sample
  auto* sample = app.add_subcommand("sample", "draw demand scenarios and write them as CSV");
  InstanceOpts sample_inst;
  add_instance_opts(sample, sample_inst);
  int sample_n = 100;
  std::uint64_t sample_seed = 1;
  std::string sample_out = "scenarios.csv";
  sample->add_option("--n", sample_n, "number of scenarios")->check(CLI::PositiveNumber);
  sample->add_option("--seed", sample_seed, "RNG seed")->envname("CCUCP_SEED");
  sample->add_option("--out", sample_out, "output CSV path");
  sample->callback(
      [&] { exit_code = cmd_sample(sample_inst, sample_n, sample_seed, sample_out); });

  // solve
  auto* solve = app.add_subcommand("solve", "reference solve (exact or greedy)");
  InstanceOpts solve_inst;
  add_instance_opts(solve, solve_inst);
  ScenarioOpts solve_scen;
  add_scenario_opts(solve, solve_scen, 100);
  bool solve_exact = false, solve_greedy = false;
  auto* fe = solve->add_flag("--exact", solve_exact, "exact solve (default)");
  auto* fg = solve->add_flag("--greedy", solve_greedy, "scalable greedy scenario dropping");
  fe->excludes(fg);
  double solve_p = 0.9, solve_budget = 60.0;
  std::uint64_t solve_seed = 1;
  std::string solve_out = "solution.json";
  solve->add_option("--p-level", solve_p, "reliability level in (0,1]");
  solve->add_option("--seed", solve_seed, "RNG seed for sampling")->envname("CCUCP_SEED");
  solve->add_option("--time-budget", solve_budget, "exact-solve time budget, seconds");
  solve->add_option("--out", solve_out, "solution JSON path");
  solve->callback([&] {
    exit_code = cmd_solve(solve_inst, solve_scen, solve_greedy, solve_p, solve_seed,
                          solve_budget, solve_out);
  });

  // sweep-p
  auto* sweep = app.add_subcommand("sweep-p", "cost vs reliability level, long-format CSV");
  std::string sweep_grid, sweep_seeds = "1", sweep_regimes = "none,moderate,strong";
  int sweep_n = 10;
  double sweep_budget = 60.0;
  std::string sweep_out = "sweep.csv";
  bool sweep_gnuplot = false;
  sweep->add_option("--p-grid", sweep_grid, "comma-separated reliability levels")->required();
  sweep->add_option("--n", sweep_n, "scenarios per set")->check(CLI::PositiveNumber);
  sweep->add_option("--seeds", sweep_seeds, "comma-separated sampling seeds");
  sweep->add_option("--regimes", sweep_regimes, "comma-separated correlation regimes");
  sweep->add_option("--time-budget", sweep_budget, "exact-solve time budget, seconds");
  sweep->add_option("--out", sweep_out, "output CSV path");
  sweep->add_flag("--gnuplot", sweep_gnuplot, "also write a companion plot script");
  sweep->callback([&] {
    exit_code = cmd_sweep_p(sweep_grid, sweep_n, sweep_seeds, sweep_regimes, sweep_budget,
                            sweep_out, sweep_gnuplot);
  });

  // compile
  auto* compile = app.add_subcommand("compile", "compile the instance into a QUBO text file");
  InstanceOpts compile_inst;
  add_instance_opts(compile, compile_inst);
  ScenarioOpts compile_scen;
  add_scenario_opts(compile, compile_scen, 10);
  WeightOpts compile_weights;
  add_weight_opts(compile, compile_weights);
  double compile_p = 0.9;
  std::uint64_t compile_seed = 1;
  std::string compile_out = "model.qubo", compile_stats;
  compile->add_option("--p-level", compile_p, "reliability level in (0,1]");
  compile->add_option("--seed", compile_seed, "RNG seed for sampling")->envname("CCUCP_SEED");
  compile->add_option("--out", compile_out, "output QUBO path");
  compile->add_option("--stats", compile_stats, "also write a stats JSON here");
  compile->callback([&] {
    exit_code = cmd_compile(compile_inst, compile_scen, compile_weights, compile_p,
                            compile_seed, compile_out, compile_stats);
  });

  // anneal
  auto* anneal_cmd = app.add_subcommand("anneal", "sample a QUBO with simulated annealing");
  std::string anneal_qubo;
  anneal_cmd->add_option("--qubo", anneal_qubo, "QUBO text file to sample");
  InstanceOpts anneal_inst;
  add_instance_opts(anneal_cmd, anneal_inst);
  ScenarioOpts anneal_scen;
  add_scenario_opts(anneal_cmd, anneal_scen, 10);
  WeightOpts anneal_weights;
  add_weight_opts(anneal_cmd, anneal_weights);
  AnnealConfig anneal_cfg;
  double anneal_p = 0.9;
  std::string anneal_out = "samples.jsonl", anneal_hist;
  anneal_cmd->add_option("--p-level", anneal_p, "reliability level in (0,1]");
  anneal_cmd->add_option("--reads", anneal_cfg.reads, "independent annealing restarts")
      ->check(CLI::PositiveNumber);
  anneal_cmd->add_option("--sweeps", anneal_cfg.sweeps, "sweeps per read")
      ->check(CLI::PositiveNumber);
  anneal_cmd->add_option("--beta-start", anneal_cfg.beta_start,
                         "initial inverse temperature (<=0: auto)");
  anneal_cmd->add_option("--beta-end", anneal_cfg.beta_end,
                         "final inverse temperature (<=0: auto)");
  anneal_cmd->add_option("--init-density", anneal_cfg.init_density,
                         "probability a bit starts at 1");
  anneal_cmd->add_flag("--track-best", anneal_cfg.track_best,
                       "return each read's lowest-energy visited state instead of its final state");
  anneal_cmd->add_option("--seed", anneal_cfg.seed, "RNG seed")->envname("CCUCP_SEED");
  anneal_cmd->add_option("--threads", anneal_cfg.threads, "worker threads (0: all cores)");
  anneal_cmd->add_option("--out", anneal_out, "samples JSONL path");
  anneal_cmd->add_option("--histogram", anneal_hist, "per-sample cost/feasibility CSV path");
  anneal_cmd->callback([&] {
    exit_code = cmd_anneal(anneal_qubo, anneal_inst, anneal_scen, anneal_weights, anneal_p,
                           anneal_cfg, anneal_out, anneal_hist);
  });

  // tune
  auto* tune = app.add_subcommand("tune", "adapt penalty weights by feasibility ratios");
  InstanceOpts tune_inst;
  add_instance_opts(tune, tune_inst);
  ScenarioOpts tune_scen;
  add_scenario_opts(tune, tune_scen, 10);
  TunerConfig tune_cfg;
  double tune_p = 0.9;
  std::string tune_config, tune_trace = "tune_trace.csv", tune_out = "weights.json";
  tune->add_option("--p-level", tune_p, "reliability level in (0,1]");
  tune->add_option("--config", tune_config, "tuner config JSON file");
  tune->add_option("--iterations", tune_cfg.iterations, "maximum tuning iterations")
      ->check(CLI::PositiveNumber);
  tune->add_option("--reads", tune_cfg.anneal.reads, "annealing reads per iteration")
      ->check(CLI::PositiveNumber);
  tune->add_option("--sweeps", tune_cfg.anneal.sweeps, "sweeps per read")
      ->check(CLI::PositiveNumber);
  tune->add_option("--amplitude", tune_cfg.step_amplitude, "largest relative weight step");
  tune->add_option("--steepness", tune_cfg.steepness, "sigmoid steepness");
  tune->add_option("--midpoint", tune_cfg.midpoint, "sigmoid midpoint ratio");
  tune->add_option("--seed", tune_cfg.seed, "RNG seed")->envname("CCUCP_SEED");
  tune->add_option("--threads", tune_cfg.anneal.threads, "worker threads (0: all cores)");
  tune->add_option("--trace", tune_trace, "per-iteration trace CSV path");
  tune->add_option("--out", tune_out, "final weights JSON path");
  tune->callback([&] {
    exit_code = cmd_tune(tune_inst, tune_scen, tune_p, tune_config, tune_cfg, tune,
                         tune_trace, tune_out);
  });

  const auto start = std::chrono::steady_clock::now();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const LimitError& e) {
    std::cerr << "limit: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
  std::printf("wall_seconds=%.3f\n", wall.count());
  return exit_code;
}

}  // namespace ccucp
