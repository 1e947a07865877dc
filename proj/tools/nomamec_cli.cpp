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

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nomamec/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"NOMA-MEC offloading toolkit: pair scheduling and learned user grouping"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run an experiment from a JSON config");
  std::string config_path;
  run_cmd->add_option("--config", config_path, "Experiment config file")->required();
  std::string output_dir;
  run_cmd->add_option("--output-dir", output_dir, "Override the config's output_dir");
  std::uint64_t seed = 0;
  run_cmd->add_option("--seed", seed, "Override the config's seed");
  int threads = 0;
  run_cmd->add_option("--threads", threads, "Override the config's worker count");
  int trials = 0;
  run_cmd->add_option("--trials", trials, "Override the config's trial count");

  auto* val_cmd =
      app.add_subcommand("validate-solver", "Check the closed forms against the grid oracle");
  int instances = 200;
  val_cmd->add_option("--instances", instances, "Sampled pair contexts")
      ->check(CLI::PositiveNumber);
  int resolution = 128;
  val_cmd->add_option("--resolution", resolution, "Oracle grid resolution")
      ->check(CLI::Range(32, 1 << 16));
  std::uint64_t val_seed = 1;
  val_cmd->add_option("--seed", val_seed, "Context sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run_cmd->parsed()) {
      nomamec::ExperimentConfig cfg = nomamec::load_config(config_path);
      if (run_cmd->count("--output-dir") > 0) cfg.output_dir = output_dir;
      if (run_cmd->count("--seed") > 0) cfg.seed = seed;
      if (run_cmd->count("--threads") > 0) cfg.threads = threads;
      if (run_cmd->count("--trials") > 0) cfg.trials = trials;
      return nomamec::run(cfg);
    }
    return nomamec::validate_solver(instances, resolution, val_seed, std::cout);
  } catch (const nomamec::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
