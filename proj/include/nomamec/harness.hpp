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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "nomamec/dqn.hpp"

namespace nomamec {

// Configuration problems carry the offending field so the CLI can name
// it and exit with status 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct SweepSpec {
  std::string name;
  std::vector<double> values;
};

struct ExperimentConfig {
  std::string experiment;     // one of the ids below
  std::uint64_t seed = 1;
  int trials = 0;             // 0: per-experiment default
  int threads = 1;
  std::string output_dir = "out";
  int num_users = 6;
  int oracle_resolution = 128;
  int validate_instances = 200;
  bool strict_primary_check = false;
  SystemParams system;
  HyperParams hyper;
  std::vector<SweepSpec> sweep;  // empty: per-experiment default
};

inline const char* const kExperimentIds[] = {
    "convergence_lr",   "convergence_users", "epsilon_policy", "energy_vs_pm",
    "energy_vs_L",      "energy_vs_deadline", "solver_validate",
};

ExperimentConfig load_config(const std::string& path);

struct ResultRow {
  double sweep_value = 0.0;
  double x = 0.0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct ResultTable {
  std::string name;               // also the CSV stem
  std::vector<ResultRow> rows;
};

// Per-context energies of the four comparison schemes.
struct SchemeEnergies {
  double hybrid = 0.0;        // full scheduler
  double full_offload = 0.0;  // beta forced to 1
  double fixed_order = 0.0;   // decoding order fixed to 0
  double oma = 0.0;           // OMA phase only
};

SchemeEnergies compare_schemes(const PairContext& ctx);

// Mean energies of the four schemes over a context grid, one row per
// scheme (x = 1..4 in the order above). Throws on an empty grid.
ResultTable compare_schemes(const std::vector<PairContext>& grid);

// Pair contexts for the comparison sweeps; trial t depends only on
// (seed, t) so sweep values share draws.
PairContext sample_pair_context(std::uint64_t seed, std::uint64_t trial,
                                const SystemParams& params);

// Runs one experiment: one CSV per curve plus manifest.json and a
// self-contained plot script in output_dir. Re-runs are byte-identical.
// Throws ConfigError for invalid configs. Returns 0, or 3 when a
// solver_validate run fails its checks.
int run(const ExperimentConfig& config);

// Writes plot_results.py rendering the given CSVs (paths must live in
// output_dir). Missing tables throw; an empty list only warns.
void emit_plot_script(const std::vector<std::string>& csv_paths,
                      const std::string& output_dir);

// Closed-form scheduler vs grid oracle plus KKT and feasibility checks
// on `instances` sampled contexts. Returns 0 when all pass, else 3.
int validate_solver(int instances, int resolution, std::uint64_t seed,
                    std::ostream& out);

void write_csv(const ResultTable& table, const std::string& path);

}  // namespace nomamec
