// Copyright 2026 The NomaMec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nomamec/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace nomamec {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

bool known_experiment(const std::string& id) {
  for (const char* e : kExperimentIds)
    if (id == e) return true;
  return false;
}

// The trial-sampling window the deadline sweep draws tau_m from.
constexpr double kPrimaryDeadlineSpan = 0.05;

void check_keys(const json& obj, const std::string& scope,
                const std::vector<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      std::string where = scope.empty() ? item.key() : scope + "." + item.key();
      throw ConfigError(where, "unknown field");
    }
  }
}

template <typename T>
void read_field(const json& obj, const std::string& scope, const char* key, T& out) {
  if (!obj.contains(key)) return;
  std::string where = scope.empty() ? key : scope + "." + std::string(key);
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where, e.what());
  }
}

void load_system(const json& obj, SystemParams& p) {
  check_keys(obj, "system",
             {"bandwidth_hz", "pathloss_exponent", "noise_psd_dbm_hz", "cell_radius_min_m",
              "cell_radius_max_m", "kappa0", "cycles_per_bit", "task_bits",
              "primary_power_w", "deadline_min_s", "deadline_max_s", "rate_in_bits"});
  read_field(obj, "system", "bandwidth_hz", p.bandwidth_hz);
  read_field(obj, "system", "pathloss_exponent", p.pathloss_exponent);
  read_field(obj, "system", "noise_psd_dbm_hz", p.noise_psd_dbm_hz);
  read_field(obj, "system", "cell_radius_min_m", p.cell_radius_min_m);
  read_field(obj, "system", "cell_radius_max_m", p.cell_radius_max_m);
  read_field(obj, "system", "kappa0", p.kappa0);
  read_field(obj, "system", "cycles_per_bit", p.cycles_per_bit);
  read_field(obj, "system", "task_bits", p.task_bits);
  read_field(obj, "system", "primary_power_w", p.primary_power_w);
  read_field(obj, "system", "deadline_min_s", p.deadline_min_s);
  read_field(obj, "system", "deadline_max_s", p.deadline_max_s);
  read_field(obj, "system", "rate_in_bits", p.rate_in_bits);
}

void load_hyper(const json& obj, HyperParams& h) {
  check_keys(obj, "hyper",
             {"eps_hi", "eps_lo", "eps_decay_steps", "epsilon_decay", "epsilon_fixed",
              "gamma", "replay_capacity", "batch_size", "target_update", "episodes",
              "steps_per_episode", "learning_rate", "hidden1", "hidden2"});
  read_field(obj, "hyper", "eps_hi", h.eps_hi);
  read_field(obj, "hyper", "eps_lo", h.eps_lo);
  read_field(obj, "hyper", "eps_decay_steps", h.eps_decay_steps);
  read_field(obj, "hyper", "epsilon_decay", h.epsilon_decay);
  read_field(obj, "hyper", "epsilon_fixed", h.epsilon_fixed);
  read_field(obj, "hyper", "gamma", h.gamma);
  read_field(obj, "hyper", "replay_capacity", h.replay_capacity);
  read_field(obj, "hyper", "batch_size", h.batch_size);
  read_field(obj, "hyper", "target_update", h.target_update);
  read_field(obj, "hyper", "episodes", h.episodes);
  read_field(obj, "hyper", "steps_per_episode", h.steps_per_episode);
  read_field(obj, "hyper", "learning_rate", h.learning_rate);
  read_field(obj, "hyper", "hidden1", h.hidden1);
  read_field(obj, "hyper", "hidden2", h.hidden2);
}

SweepSpec load_sweep(const json& obj, const std::string& scope) {
  check_keys(obj, scope, {"name", "values"});
  SweepSpec s;
  read_field(obj, scope, "name", s.name);
  read_field(obj, scope, "values", s.values);
  if (s.name.empty()) throw ConfigError(scope + ".name", "missing sweep name");
  if (s.values.empty()) throw ConfigError(scope + ".values", "sweep needs at least one value");
  for (double v : s.values)
    if (!std::isfinite(v)) throw ConfigError(scope + ".values", "values must be finite");
  return s;
}

// Runs fn(0..n-1) on up to `threads` workers; slot writes keep results
// ordered so aggregation is schedule-independent.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      for (int i = t; i < n; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanStderr aggregate(const std::vector<double>& xs) {
  MeanStderr out;
  std::size_t n = xs.size();
  if (n == 0) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / n;
  if (n > 1) {
    double sq = 0.0;
    for (double x : xs) {
      double d = x - out.mean;
      sq += d * d;
    }
    out.stderr_ = std::sqrt(sq / (n - 1)) / std::sqrt(static_cast<double>(n));
  }
  return out;
}

SweepSpec default_sweep(const std::string& experiment) {
  if (experiment == "convergence_lr") return {"learning_rate", {0.1, 0.01, 0.001}};
  if (experiment == "convergence_users") return {"num_users", {6, 8, 10}};
  if (experiment == "epsilon_policy") return {"epsilon_fixed", {0.1}};
  if (experiment == "energy_vs_pm") return {"primary_power_w", {0.25, 0.5, 1.0, 2.0, 4.0}};
  if (experiment == "energy_vs_L") return {"task_bits", {1e6, 2e6, 3e6, 4e6}};
  if (experiment == "energy_vs_deadline") return {"deadline_max_s", {0.25, 0.3, 0.35, 0.4}};
  return {};
}

int default_trials(const std::string& experiment) {
  if (experiment == "convergence_lr" || experiment == "convergence_users" ||
      experiment == "epsilon_policy")
    return 1;
  return 500;
}

// Seed streams for the harness, kept apart from the in-module ones.
enum : std::uint64_t {
  kStreamEnv = 101,
  kStreamLearn = 102,
  kStreamPolicyEval = 103,
};

std::vector<double> episode_means(const TrainResult& r) {
  std::vector<double> out;
  out.reserve(r.log.size());
  for (const auto& s : r.log) out.push_back(s.mean_energy_j);
  return out;
}

ResultTable episode_table(const std::string& name, double sweep_value,
                          const std::vector<std::vector<double>>& per_trial) {
  ResultTable t;
  t.name = name;
  if (per_trial.empty()) return t;
  std::size_t episodes = per_trial.front().size();
  for (std::size_t e = 0; e < episodes; ++e) {
    std::vector<double> xs;
    xs.reserve(per_trial.size());
    for (const auto& trial : per_trial) xs.push_back(trial.at(e));
    MeanStderr ms = aggregate(xs);
    t.rows.push_back({sweep_value, static_cast<double>(e), ms.mean, ms.stderr_});
  }
  return t;
}

struct DqnRunSpec {
  int num_users = 6;
  HyperParams hyper;
};

std::vector<std::vector<double>> run_dqn_trials(const ExperimentConfig& cfg,
                                                const DqnRunSpec& spec, int trials) {
  std::vector<std::vector<double>> curves(trials);
  parallel_for(trials, cfg.threads, [&](int t) {
    std::uint64_t env_seed =
        derive_seed(cfg.seed, {kStreamEnv, static_cast<std::uint64_t>(t)});
    std::uint64_t learn_seed =
        derive_seed(cfg.seed, {kStreamLearn, static_cast<std::uint64_t>(t)});
    GroupingEnv env(cfg.system, spec.num_users, env_seed);
    curves[t] = episode_means(train(env, spec.hyper, learn_seed));
  });
  return curves;
}

std::vector<ResultTable> run_convergence_lr(const ExperimentConfig& cfg, int trials) {
  std::vector<ResultTable> tables;
  for (double lr : cfg.sweep.front().values) {
    DqnRunSpec spec{cfg.num_users, cfg.hyper};
    spec.hyper.learning_rate = lr;
    tables.push_back(
        episode_table("lr_" + fmt_short(lr), lr, run_dqn_trials(cfg, spec, trials)));
  }
  return tables;
}

std::vector<ResultTable> run_convergence_users(const ExperimentConfig& cfg, int trials) {
  std::vector<ResultTable> tables;
  for (double v : cfg.sweep.front().values) {
    DqnRunSpec spec{static_cast<int>(v), cfg.hyper};
    tables.push_back(
        episode_table("users_" + fmt_short(v), v, run_dqn_trials(cfg, spec, trials)));
  }
  return tables;
}

std::vector<ResultTable> run_epsilon_policy(const ExperimentConfig& cfg, int trials) {
  std::vector<ResultTable> tables;
  {
    DqnRunSpec spec{cfg.num_users, cfg.hyper};
    spec.hyper.epsilon_decay = true;
    // sweep_value -1 labels the decaying-epsilon curve.
    tables.push_back(episode_table("eps_decay", -1.0, run_dqn_trials(cfg, spec, trials)));
  }
  for (double eps : cfg.sweep.front().values) {
    DqnRunSpec spec{cfg.num_users, cfg.hyper};
    spec.hyper.epsilon_decay = false;
    spec.hyper.epsilon_fixed = eps;
    tables.push_back(episode_table("eps_fixed_" + fmt_short(eps), eps,
                                   run_dqn_trials(cfg, spec, trials)));
  }
  return tables;
}

// Scheme comparison over a context field sweep; trial draws are shared
// across sweep values.
std::vector<ResultTable> run_energy_sweep(const ExperimentConfig& cfg, int trials) {
  const SweepSpec& sweep = cfg.sweep.front();
  SystemParams sample_params = cfg.system;
  if (cfg.experiment == "energy_vs_deadline") {
    sample_params.deadline_max_s = sample_params.deadline_min_s + kPrimaryDeadlineSpan;
  }

  ResultTable hybrid{"scheme_hybrid", {}};
  ResultTable full{"scheme_full_offload", {}};
  ResultTable fixed{"scheme_fixed_order", {}};
  ResultTable oma{"scheme_oma", {}};

  for (double v : sweep.values) {
    std::vector<SchemeEnergies> per_trial(trials);
    parallel_for(trials, cfg.threads, [&](int t) {
      PairContext ctx =
          sample_pair_context(cfg.seed, static_cast<std::uint64_t>(t), sample_params);
      if (cfg.experiment == "energy_vs_pm") {
        ctx.P_m = v;
      } else if (cfg.experiment == "energy_vs_L") {
        ctx.L = v;
      } else {
        ctx.tau_n = v;
      }
      per_trial[t] = compare_schemes(ctx);
    });
    auto column = [&](double SchemeEnergies::*field) {
      std::vector<double> xs(trials);
      for (int t = 0; t < trials; ++t) xs[t] = per_trial[t].*field;
      return aggregate(xs);
    };
    MeanStderr h = column(&SchemeEnergies::hybrid);
    MeanStderr f = column(&SchemeEnergies::full_offload);
    MeanStderr x = column(&SchemeEnergies::fixed_order);
    MeanStderr o = column(&SchemeEnergies::oma);
    hybrid.rows.push_back({v, v, h.mean, h.stderr_});
    full.rows.push_back({v, v, f.mean, f.stderr_});
    fixed.rows.push_back({v, v, x.mean, x.stderr_});
    oma.rows.push_back({v, v, o.mean, o.stderr_});
  }
  return {hybrid, full, fixed, oma};
}

void write_manifest(const ExperimentConfig& cfg, int trials,
                    const std::vector<ResultTable>& tables, const fs::path& dir) {
  ordered_json j;
  j["format"] = "nomamec-experiment";
  j["version"] = 1;
  j["experiment"] = cfg.experiment;
  j["seed"] = cfg.seed;
  j["trials"] = trials;
  j["threads"] = cfg.threads;
  j["num_users"] = cfg.num_users;
  j["oracle_resolution"] = cfg.oracle_resolution;
  j["validate_instances"] = cfg.validate_instances;
  j["strict_primary_check"] = cfg.strict_primary_check;
  j["system"] = {{"bandwidth_hz", cfg.system.bandwidth_hz},
                 {"pathloss_exponent", cfg.system.pathloss_exponent},
                 {"noise_psd_dbm_hz", cfg.system.noise_psd_dbm_hz},
                 {"cell_radius_min_m", cfg.system.cell_radius_min_m},
                 {"cell_radius_max_m", cfg.system.cell_radius_max_m},
                 {"kappa0", cfg.system.kappa0},
                 {"cycles_per_bit", cfg.system.cycles_per_bit},
                 {"task_bits", cfg.system.task_bits},
                 {"primary_power_w", cfg.system.primary_power_w},
                 {"deadline_min_s", cfg.system.deadline_min_s},
                 {"deadline_max_s", cfg.system.deadline_max_s},
                 {"rate_in_bits", cfg.system.rate_in_bits}};
  j["hyper"] = {{"eps_hi", cfg.hyper.eps_hi},
                {"eps_lo", cfg.hyper.eps_lo},
                {"eps_decay_steps", cfg.hyper.eps_decay_steps},
                {"epsilon_decay", cfg.hyper.epsilon_decay},
                {"epsilon_fixed", cfg.hyper.epsilon_fixed},
                {"gamma", cfg.hyper.gamma},
                {"replay_capacity", cfg.hyper.replay_capacity},
                {"batch_size", cfg.hyper.batch_size},
                {"target_update", cfg.hyper.target_update},
                {"episodes", cfg.hyper.episodes},
                {"steps_per_episode", cfg.hyper.steps_per_episode},
                {"learning_rate", cfg.hyper.learning_rate},
                {"hidden1", cfg.hyper.hidden1},
                {"hidden2", cfg.hyper.hidden2}};
  if (!cfg.sweep.empty()) {
    j["sweep"] = {{"name", cfg.sweep.front().name}, {"values", cfg.sweep.front().values}};
  }
  j["columns"] = {"sweep_value", "x", "mean", "stderr"};
  ordered_json list = ordered_json::array();
  for (const auto& t : tables) {
    list.push_back({{"name", t.name},
                    {"file", t.name + ".csv"},
                    {"rows", t.rows.size()}});
  }
  j["tables"] = std::move(list);
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest.json");
  out << j.dump(2) << "\n";
}

void validate_config(const ExperimentConfig& cfg) {
  if (!known_experiment(cfg.experiment))
    throw ConfigError("experiment", "unknown experiment id '" + cfg.experiment + "'");
  if (cfg.trials < 0) throw ConfigError("trials", "must be >= 0");
  if (cfg.threads < 1) throw ConfigError("threads", "must be >= 1");
  if (cfg.output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
  if (cfg.num_users < 2 || cfg.num_users > 12 || cfg.num_users % 2 != 0)
    throw ConfigError("num_users", "must be even and in [2, 12]");
  if (cfg.oracle_resolution < 32) throw ConfigError("oracle_resolution", "must be >= 32");
  if (cfg.validate_instances < 1) throw ConfigError("validate_instances", "must be >= 1");
  try {
    cfg.system.validate();
  } catch (const std::exception& e) {
    throw ConfigError("system", e.what());
  }
  try {
    cfg.hyper.validate();
  } catch (const std::exception& e) {
    throw ConfigError("hyper", e.what());
  }

  SweepSpec expected = default_sweep(cfg.experiment);
  if (cfg.experiment == "solver_validate") {
    if (!cfg.sweep.empty())
      throw ConfigError("sweep", "solver_validate does not take a sweep");
    return;
  }
  if (cfg.sweep.size() > 1) throw ConfigError("sweep", "one sweep per experiment");
  if (!cfg.sweep.empty() && cfg.sweep.front().name != expected.name)
    throw ConfigError("sweep.name", "experiment '" + cfg.experiment + "' sweeps '" +
                                        expected.name + "'");
  const SweepSpec& sweep = cfg.sweep.empty() ? expected : cfg.sweep.front();
  if (cfg.experiment == "convergence_users") {
    for (double v : sweep.values) {
      int k = static_cast<int>(v);
      if (v != k || k < 2 || k > 12 || k % 2 != 0)
        throw ConfigError("sweep.values", "user counts must be even integers in [2, 12]");
    }
  }
  if (cfg.experiment == "energy_vs_deadline") {
    double floor = cfg.system.deadline_min_s + kPrimaryDeadlineSpan;
    for (double v : sweep.values) {
      if (v < floor)
        throw ConfigError("sweep.values",
                          "deadline values must be >= deadline_min_s + " +
                              fmt_short(kPrimaryDeadlineSpan) +
                              " so the longer-deadline user stays the offloader");
    }
  }
  for (double v : sweep.values)
    if (!(v > 0.0) && cfg.experiment != "epsilon_policy")
      throw ConfigError("sweep.values", "values must be positive");
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("(file)", "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("(file)", std::string("parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("(file)", "top level must be an object");

  check_keys(j, "",
             {"experiment", "seed", "trials", "threads", "output_dir", "num_users",
              "oracle_resolution", "validate_instances", "strict_primary_check", "system",
              "hyper", "sweep"});

  ExperimentConfig cfg;
  read_field(j, "", "experiment", cfg.experiment);
  if (cfg.experiment.empty()) throw ConfigError("experiment", "missing");
  read_field(j, "", "seed", cfg.seed);
  read_field(j, "", "trials", cfg.trials);
  read_field(j, "", "threads", cfg.threads);
  read_field(j, "", "output_dir", cfg.output_dir);
  read_field(j, "", "num_users", cfg.num_users);
  read_field(j, "", "oracle_resolution", cfg.oracle_resolution);
  read_field(j, "", "validate_instances", cfg.validate_instances);
  read_field(j, "", "strict_primary_check", cfg.strict_primary_check);
  if (j.contains("system")) {
    if (!j.at("system").is_object()) throw ConfigError("system", "must be an object");
    load_system(j.at("system"), cfg.system);
  }
  if (j.contains("hyper")) {
    if (!j.at("hyper").is_object()) throw ConfigError("hyper", "must be an object");
    load_hyper(j.at("hyper"), cfg.hyper);
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    if (s.is_object()) {
      cfg.sweep.push_back(load_sweep(s, "sweep"));
    } else if (s.is_array()) {
      for (const auto& item : s) cfg.sweep.push_back(load_sweep(item, "sweep"));
    } else {
      throw ConfigError("sweep", "must be an object or an array of objects");
    }
  }
  validate_config(cfg);
  return cfg;
}

SchemeEnergies compare_schemes(const PairContext& ctx) {
  SchemeEnergies e;
  e.hybrid = solve_pair(ctx).E_tot;
  e.full_offload = solve_pair(ctx, {SolveRestriction::FullOffload, false}).E_tot;
  e.fixed_order = solve_pair(ctx, {SolveRestriction::FixedDecodeNFirst, false}).E_tot;
  e.oma = solve_pair(ctx, {SolveRestriction::OmaOnly, false}).E_tot;
  return e;
}

ResultTable compare_schemes(const std::vector<PairContext>& grid) {
  if (grid.empty())
    throw std::invalid_argument("compare_schemes: context grid must be nonempty");
  std::vector<double> h, f, x, o;
  for (const auto& ctx : grid) {
    SchemeEnergies e = compare_schemes(ctx);
    h.push_back(e.hybrid);
    f.push_back(e.full_offload);
    x.push_back(e.fixed_order);
    o.push_back(e.oma);
  }
  ResultTable t;
  t.name = "scheme_means";
  const std::vector<double>* cols[] = {&h, &f, &x, &o};
  for (int s = 0; s < 4; ++s) {
    MeanStderr ms = aggregate(*cols[s]);
    t.rows.push_back({static_cast<double>(s + 1), static_cast<double>(s + 1), ms.mean,
                      ms.stderr_});
  }
  return t;
}

PairContext sample_pair_context(std::uint64_t seed, std::uint64_t trial,
                                const SystemParams& params) {
  Rng rng(derive_seed(seed, {trial}));
  std::vector<UserProfile> users = sample_users(rng, 2, params);
  GroupingState state;
  for (const auto& u : users) {
    state.gains.push_back(channel_gain(u, params));
    state.deadlines.push_back(u.deadline_s);
  }
  return make_pair_context(state, 0, 1, params);
}

int validate_solver(int instances, int resolution, std::uint64_t seed, std::ostream& out) {
  if (instances < 1) throw std::invalid_argument("validate_solver: instances must be >= 1");
  SystemParams params;

  double worst_excess = 0.0;        // solve - oracle
  double worst_ratio = 0.0;         // oracle / solve - 1
  double worst_stationarity = 0.0;
  double worst_complementarity = 0.0;
  double worst_primal = 0.0;        // positive => infeasible
  for (int i = 0; i < instances; ++i) {
    PairContext ctx = sample_pair_context(seed, static_cast<std::uint64_t>(i), params);
    AllocationResult solve = solve_pair(ctx);
    AllocationResult oracle = grid_oracle(ctx, resolution);
    worst_excess = std::max(worst_excess, solve.E_tot - oracle.E_tot);
    if (solve.E_tot > 0.0)
      worst_ratio = std::max(worst_ratio, oracle.E_tot / solve.E_tot - 1.0);

    for (const auto& cand : closed_form_hybrid_candidates(ctx)) {
      KktResidual kkt = kkt_residual(ctx, cand);
      for (double s : kkt.stationarity)
        worst_stationarity = std::max(worst_stationarity, std::fabs(s));
      for (double c : kkt.complementarity)
        worst_complementarity = std::max(worst_complementarity, std::fabs(c));
      for (double p : kkt.primal_violation) {
        double scale = std::max(1.0, cand.beta * ctx.L);
        worst_primal = std::max(worst_primal, p / scale);
      }
    }
  }

  bool ok = worst_excess <= 1e-9 && worst_ratio <= 0.01 && worst_stationarity <= 1e-6 &&
            worst_complementarity <= 1e-8 && worst_primal <= 1e-9;
  out << "instances: " << instances << "\n";
  out << "grid resolution: " << resolution << "\n";
  out << "max closed-form excess over oracle (J): " << fmt17(worst_excess) << "\n";
  out << "max oracle excess over closed form (rel): " << fmt17(worst_ratio) << "\n";
  out << "max KKT stationarity residual: " << fmt17(worst_stationarity) << "\n";
  out << "max KKT complementarity residual: " << fmt17(worst_complementarity) << "\n";
  out << "max relative primal violation: " << fmt17(worst_primal) << "\n";
  out << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? 0 : 3;
}

void write_csv(const ResultTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "sweep_value,x,mean,stderr\n";
  for (const auto& r : table.rows) {
    out << fmt17(r.sweep_value) << "," << fmt17(r.x) << "," << fmt17(r.mean) << ","
        << fmt17(r.stderr_) << "\n";
  }
}

void emit_plot_script(const std::vector<std::string>& csv_paths,
                      const std::string& output_dir) {
  if (csv_paths.empty())
    std::cerr << "emit_plot_script: warning: no tables to plot\n";
  std::vector<std::string> names;
  for (const auto& p : csv_paths) {
    if (!fs::exists(p)) throw std::runtime_error("emit_plot_script: missing table " + p);
    names.push_back(fs::path(p).filename().string());
  }

  std::ofstream out(fs::path(output_dir) / "plot_results.py", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write plot_results.py");
  out << "#!/usr/bin/env python3\n";
  out << "# Copyright 2026 The NomaMec Authors\n";
  out << "#\n";
  out << "# Licensed under the Apache License, Version 2.0 (the \"License\");\n";
  out << "# you may not use this file except in compliance with the License.\n";
  out << "# You may obtain a copy of the License at\n";
  out << "#\n";
  out << "#      http://www.apache.org/licenses/LICENSE-2.0\n";
  out << "#\n";
  out << "# Unless required by applicable law or agreed to in writing, software\n";
  out << "# distributed under the License is distributed on an \"AS IS\" BASIS,\n";
  out << "# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.\n";
  out << "# See the License for the specific language governing permissions and\n";
  out << "# limitations under the License.\n";
  out << "\n";
  out << "\"\"\"Renders the experiment tables next to this script into one PNG.\n";
  out << "\n";
  out << "Run it manually; the toolkit only writes data files.\n";
  out << "\"\"\"\n";
  out << "\n";
  out << "import csv\n";
  out << "import pathlib\n";
  out << "\n";
  out << "import matplotlib\n";
  out << "\n";
  out << "matplotlib.use(\"Agg\")\n";
  out << "import matplotlib.pyplot as plt\n";
  out << "\n";
  out << "TABLES = [\n";
  for (const auto& n : names) out << "    \"" << n << "\",\n";
  out << "]\n";
  out << "\n";
  out << "\n";
  out << "def render(here, name):\n";
  out << "    xs, ys, errs = [], [], []\n";
  out << "    with open(here / name, newline=\"\") as f:\n";
  out << "        for row in csv.DictReader(f):\n";
  out << "            xs.append(float(row[\"x\"]))\n";
  out << "            ys.append(float(row[\"mean\"]))\n";
  out << "            errs.append(float(row[\"stderr\"]))\n";
  out << "    stem = name.removesuffix(\".csv\")\n";
  out << "    fig, ax = plt.subplots(figsize=(7, 4.5))\n";
  out << "    if any(errs):\n";
  out << "        ax.errorbar(xs, ys, yerr=errs, capsize=2)\n";
  out << "    else:\n";
  out << "        ax.plot(xs, ys)\n";
  out << "    ax.set_title(stem)\n";
  out << "    ax.set_xlabel(\"x\")\n";
  out << "    ax.set_ylabel(\"mean energy (J)\")\n";
  out << "    ax.grid(True, alpha=0.3)\n";
  out << "    fig.tight_layout()\n";
  out << "    fig.savefig(here / f\"{stem}.png\", dpi=150)\n";
  out << "    plt.close(fig)\n";
  out << "    print(f\"wrote {here / (stem + '.png')}\")\n";
  out << "\n";
  out << "\n";
  out << "def main():\n";
  out << "    here = pathlib.Path(__file__).resolve().parent\n";
  out << "    for name in TABLES:\n";
  out << "        render(here, name)\n";
  out << "\n";
  out << "\n";
  out << "if __name__ == \"__main__\":\n";
  out << "    main()\n";
}

int run(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  validate_config(cfg);
  if (cfg.sweep.empty() && cfg.experiment != "solver_validate")
    cfg.sweep.push_back(default_sweep(cfg.experiment));
  // Rows come out sorted by x; trial draws are value-independent, so
  // sorting cannot change any curve's content.
  for (auto& s : cfg.sweep) std::sort(s.values.begin(), s.values.end());
  int trials = cfg.trials > 0 ? cfg.trials : default_trials(cfg.experiment);

  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  if (cfg.experiment == "solver_validate") {
    std::ostringstream report;
    int status =
        validate_solver(cfg.validate_instances, cfg.oracle_resolution, cfg.seed, report);
    std::ofstream out(dir / "validation.txt", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write validation.txt");
    out << report.str();
    std::cout << report.str();
    write_manifest(cfg, cfg.validate_instances, {}, dir);
    return status;
  }

  std::vector<ResultTable> tables;
  if (cfg.experiment == "convergence_lr") {
    tables = run_convergence_lr(cfg, trials);
  } else if (cfg.experiment == "convergence_users") {
    tables = run_convergence_users(cfg, trials);
  } else if (cfg.experiment == "epsilon_policy") {
    tables = run_epsilon_policy(cfg, trials);
  } else {
    tables = run_energy_sweep(cfg, trials);
  }

  std::vector<std::string> csv_paths;
  for (const auto& t : tables) {
    std::string path = (dir / (t.name + ".csv")).string();
    write_csv(t, path);
    csv_paths.push_back(path);
  }
  write_manifest(cfg, trials, tables, dir);
  emit_plot_script(csv_paths, cfg.output_dir);
  return 0;
}

}  // namespace nomamec
