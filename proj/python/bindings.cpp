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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nomamec/channel.hpp"
#include "nomamec/dqn.hpp"
#include "nomamec/grouping.hpp"
#include "nomamec/harness.hpp"
#include "nomamec/lambertw.hpp"
#include "nomamec/mlp.hpp"
#include "nomamec/solver.hpp"

namespace py = pybind11;
using namespace nomamec;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Energy-minimal NOMA-MEC offloading: pair scheduling and learned grouping";
  m.attr("__version__") = "1.0.0";

  m.def("lambert_w0", &lambert_w0, py::arg("x"),
        "Principal Lambert W branch on [0, inf)");

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init<>())
      .def_readwrite("bandwidth_hz", &SystemParams::bandwidth_hz)
      .def_readwrite("pathloss_exponent", &SystemParams::pathloss_exponent)
      .def_readwrite("noise_psd_dbm_hz", &SystemParams::noise_psd_dbm_hz)
      .def_readwrite("cell_radius_min_m", &SystemParams::cell_radius_min_m)
      .def_readwrite("cell_radius_max_m", &SystemParams::cell_radius_max_m)
      .def_readwrite("kappa0", &SystemParams::kappa0)
      .def_readwrite("cycles_per_bit", &SystemParams::cycles_per_bit)
      .def_readwrite("task_bits", &SystemParams::task_bits)
      .def_readwrite("primary_power_w", &SystemParams::primary_power_w)
      .def_readwrite("deadline_min_s", &SystemParams::deadline_min_s)
      .def_readwrite("deadline_max_s", &SystemParams::deadline_max_s)
      .def_readwrite("rate_in_bits", &SystemParams::rate_in_bits)
      .def("validate", &SystemParams::validate)
      .def("noise_power_w", &SystemParams::noise_power_w)
      .def("effective_bandwidth_hz", &SystemParams::effective_bandwidth_hz);

  py::class_<PairContext>(m, "PairContext")
      .def(py::init<>())
      .def_readwrite("h_m", &PairContext::h_m)
      .def_readwrite("h_n", &PairContext::h_n)
      .def_readwrite("tau_m", &PairContext::tau_m)
      .def_readwrite("tau_n", &PairContext::tau_n)
      .def_readwrite("P_m", &PairContext::P_m)
      .def_readwrite("L", &PairContext::L)
      .def_readwrite("B", &PairContext::B)
      .def_readwrite("kappa0", &PairContext::kappa0)
      .def_readwrite("C", &PairContext::C)
      .def("validate", &PairContext::validate)
      .def("t_r_max", &PairContext::t_r_max);

  py::enum_<SchemeMode>(m, "SchemeMode")
      .value("HybridUnconstrained", SchemeMode::HybridUnconstrained)
      .value("HybridBoundary", SchemeMode::HybridBoundary)
      .value("PureNoma", SchemeMode::PureNoma)
      .value("Oma", SchemeMode::Oma);

  py::class_<SchemeTag>(m, "SchemeTag")
      .def(py::init<>())
      .def_readwrite("decode_m_first", &SchemeTag::decode_m_first)
      .def_readwrite("mode", &SchemeTag::mode);

  py::class_<AllocationResult>(m, "AllocationResult")
      .def_readonly("scheme", &AllocationResult::scheme)
      .def_readonly("P_n", &AllocationResult::P_n)
      .def_readonly("P_r", &AllocationResult::P_r)
      .def_readonly("t_r", &AllocationResult::t_r)
      .def_readonly("beta", &AllocationResult::beta)
      .def_readonly("E_loc", &AllocationResult::E_loc)
      .def_readonly("E_off", &AllocationResult::E_off)
      .def_readonly("E_tot", &AllocationResult::E_tot);

  py::enum_<SolveRestriction>(m, "SolveRestriction")
      .value("NoRestriction", SolveRestriction::None)
      .value("FullOffload", SolveRestriction::FullOffload)
      .value("FixedDecodeNFirst", SolveRestriction::FixedDecodeNFirst)
      .value("OmaOnly", SolveRestriction::OmaOnly);

  py::class_<SolveOptions>(m, "SolveOptions")
      .def(py::init<>())
      .def_readwrite("restriction", &SolveOptions::restriction)
      .def_readwrite("strict_primary_check", &SolveOptions::strict_primary_check);

  py::class_<KktResidual>(m, "KktResidual")
      .def_readonly("stationarity", &KktResidual::stationarity)
      .def_readonly("complementarity", &KktResidual::complementarity)
      .def_readonly("primal_violation", &KktResidual::primal_violation);

  m.def("solve_pair", &solve_pair, py::arg("ctx"), py::arg("options") = SolveOptions{});
  m.def("grid_oracle", &grid_oracle, py::arg("ctx"), py::arg("resolution") = 128);
  m.def("optimal_time", &optimal_time, py::arg("ctx"));
  m.def("optimal_beta", &optimal_beta, py::arg("ctx"), py::arg("scheme"));
  m.def("branch_energy", &branch_energy, py::arg("ctx"), py::arg("scheme"), py::arg("beta"),
        py::arg("t_r"));
  m.def("closed_form_hybrid_candidates", &closed_form_hybrid_candidates, py::arg("ctx"));
  m.def("kkt_residual", &kkt_residual, py::arg("ctx"), py::arg("alloc"));
  m.def("lemma1_gap", &lemma1_gap, py::arg("ctx"));
  m.def("local_energy", &local_energy, py::arg("ctx"), py::arg("beta"), py::arg("t_total"));

  py::class_<SchemeEnergies>(m, "SchemeEnergies")
      .def_readonly("hybrid", &SchemeEnergies::hybrid)
      .def_readonly("full_offload", &SchemeEnergies::full_offload)
      .def_readonly("fixed_order", &SchemeEnergies::fixed_order)
      .def_readonly("oma", &SchemeEnergies::oma);

  m.def("compare_schemes", py::overload_cast<const PairContext&>(&compare_schemes),
        py::arg("ctx"));
  m.def("sample_pair_context", &sample_pair_context, py::arg("seed"), py::arg("trial"),
        py::arg("params"));

  py::class_<GroupingState>(m, "GroupingState")
      .def(py::init<>())
      .def_readwrite("gains", &GroupingState::gains)
      .def_readwrite("deadlines", &GroupingState::deadlines);

  py::class_<Pairing>(m, "Pairing")
      .def(py::init<>())
      .def_readwrite("pairs", &Pairing::pairs)
      .def("num_users", &Pairing::num_users);

  m.def("pairing_count", &pairing_count, py::arg("num_users"));
  m.def("action_to_pairing", &action_to_pairing, py::arg("action"), py::arg("num_users"));
  m.def("pairing_to_action", &pairing_to_action, py::arg("pairing"));
  m.def("make_pair_context", &make_pair_context, py::arg("state"), py::arg("u"),
        py::arg("v"), py::arg("params"));
  m.def("grouping_energy", &grouping_energy, py::arg("state"), py::arg("pairing"),
        py::arg("params"));
  m.def("exhaustive_best", &exhaustive_best, py::arg("state"), py::arg("params"));

  py::class_<HyperParams>(m, "HyperParams")
      .def(py::init<>())
      .def_readwrite("eps_hi", &HyperParams::eps_hi)
      .def_readwrite("eps_lo", &HyperParams::eps_lo)
      .def_readwrite("eps_decay_steps", &HyperParams::eps_decay_steps)
      .def_readwrite("epsilon_decay", &HyperParams::epsilon_decay)
      .def_readwrite("epsilon_fixed", &HyperParams::epsilon_fixed)
      .def_readwrite("gamma", &HyperParams::gamma)
      .def_readwrite("replay_capacity", &HyperParams::replay_capacity)
      .def_readwrite("batch_size", &HyperParams::batch_size)
      .def_readwrite("target_update", &HyperParams::target_update)
      .def_readwrite("episodes", &HyperParams::episodes)
      .def_readwrite("steps_per_episode", &HyperParams::steps_per_episode)
      .def_readwrite("learning_rate", &HyperParams::learning_rate)
      .def_readwrite("hidden1", &HyperParams::hidden1)
      .def_readwrite("hidden2", &HyperParams::hidden2)
      .def("validate", &HyperParams::validate);

  py::class_<QNetwork>(m, "QNetwork")
      .def_readonly("dims", &QNetwork::dims)
      .def("input_size", &QNetwork::input_size)
      .def("output_size", &QNetwork::output_size);

  m.def("forward", &forward, py::arg("net"), py::arg("x"));
  m.def("save_qnetwork", &save_qnetwork, py::arg("net"), py::arg("path"));
  m.def("load_qnetwork", &load_qnetwork, py::arg("path"));

  py::class_<GroupingEnv>(m, "GroupingEnv")
      .def(py::init<const SystemParams&, int, std::uint64_t>(), py::arg("params"),
           py::arg("num_users"), py::arg("seed"))
      .def("begin_episode", &GroupingEnv::begin_episode, py::arg("episode"))
      .def("advance", &GroupingEnv::advance)
      .def_property_readonly("state", &GroupingEnv::state)
      .def_property_readonly("distances", &GroupingEnv::distances)
      .def("num_users", &GroupingEnv::num_users);

  py::class_<EpisodeStats>(m, "EpisodeStats")
      .def_readonly("episode", &EpisodeStats::episode)
      .def_readonly("mean_energy_j", &EpisodeStats::mean_energy_j)
      .def_readonly("epsilon", &EpisodeStats::epsilon)
      .def_readonly("loss_mean", &EpisodeStats::loss_mean);

  py::class_<StateNormalizer>(m, "StateNormalizer")
      .def_readonly("gain_log10_mean", &StateNormalizer::gain_log10_mean)
      .def_readonly("gain_log10_std", &StateNormalizer::gain_log10_std)
      .def_readonly("deadline_min_s", &StateNormalizer::deadline_min_s)
      .def_readonly("deadline_max_s", &StateNormalizer::deadline_max_s)
      .def("normalize", &StateNormalizer::normalize, py::arg("state"));

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("net", &TrainResult::net)
      .def_readonly("normalizer", &TrainResult::normalizer)
      .def_readonly("reward_scale_j", &TrainResult::reward_scale_j)
      .def_readonly("log", &TrainResult::log);

  m.def("train", &train, py::arg("env"), py::arg("hyper"), py::arg("learn_seed"),
        py::call_guard<py::gil_scoped_release>());
  m.def("random_policy_mean_energy", &random_policy_mean_energy, py::arg("params"),
        py::arg("num_users"), py::arg("env_seed"), py::arg("hyper"),
        py::arg("first_episode"), py::arg("last_episode"), py::arg("policy_seed"),
        py::call_guard<py::gil_scoped_release>());
  m.def("exhaustive_mean_energy", &exhaustive_mean_energy, py::arg("params"),
        py::arg("num_users"), py::arg("env_seed"), py::arg("hyper"),
        py::arg("first_episode"), py::arg("last_episode"),
        py::call_guard<py::gil_scoped_release>());

  m.def(
      "run_config",
      [](const std::string& path) {
        ExperimentConfig cfg = load_config(path);
        return run(cfg);
      },
      py::arg("path"), "Load a JSON experiment config and run it; returns the exit status");
  m.def(
      "validate_solver",
      [](int instances, int resolution, std::uint64_t seed) {
        std::ostringstream report;
        int status = validate_solver(instances, resolution, seed, report);
        return py::make_tuple(status, report.str());
      },
      py::arg("instances") = 200, py::arg("resolution") = 128, py::arg("seed") = 1,
      "Closed forms vs grid oracle; returns (status, report)");
}
