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

#include <functional>
#include <vector>

namespace nomamec {

// One sub-channel pair. U_m is the delay-constrained user transmitting at
// fixed power P_m; U_n offloads a beta-fraction of its task and computes
// the rest locally. Gains are noise-normalized (1/W), times in seconds,
// L in bits (treated as nats unless the caller rescaled B), B in Hz.
struct PairContext {
  double h_m = 0.0;
  double h_n = 0.0;
  double tau_m = 0.0;    // U_m's deadline; also the NOMA phase length
  double tau_n = 0.0;    // U_n's deadline, tau_m <= tau_n
  double P_m = 0.0;
  double L = 0.0;
  double B = 0.0;
  double kappa0 = 0.0;
  double C = 0.0;        // cycles per bit

  void validate() const;       // throws std::invalid_argument
  double t_r_max() const { return tau_n - tau_m; }
};

// decode_m_first == 1: U_m's signal is decoded first, which caps U_n's
// NOMA-phase power so U_m still meets its deadline. decode_m_first == 0:
// U_n is decoded first against U_m's interference, and U_m's own rate
// constraint is outside the optimization.
enum class SchemeMode {
  HybridUnconstrained,   // both phases used, power cap slack
  HybridBoundary,        // both phases used, U_m's decode cap tight (order 1 only)
  PureNoma,              // NOMA phase only, t_r = 0
  Oma                    // OMA phase only
};

struct SchemeTag {
  int decode_m_first = 1;
  SchemeMode mode = SchemeMode::HybridUnconstrained;
};

struct AllocationResult {
  SchemeTag scheme;
  double P_n = 0.0;      // U_n's NOMA-phase power (W)
  double P_r = 0.0;      // U_n's OMA-phase power (W)
  double t_r = 0.0;      // OMA phase length (s)
  double beta = 0.0;     // offloaded task fraction
  double E_loc = 0.0;
  double E_off = 0.0;
  double E_tot = 0.0;    // always E_loc + E_off
};

struct KktResidual {
  std::vector<double> stationarity;       // d/dP_n, d/dP_r of the Lagrangian
  std::vector<double> complementarity;    // multiplier * slack products
  std::vector<double> primal_violation;   // constraint values, <= 0 when feasible
};

// B*ln(1 + P*h / (P_int*h_int + 1))  [nats/s]
double rate_uplink(double p_signal, double h_signal, double p_interf, double h_interf,
                   double bandwidth_hz);

// kappa0 * (C*(1-beta)*L)^3 / t_total^2. Zero when beta == 1; throws
// std::invalid_argument when t_total == 0 with beta < 1.
double local_energy(const PairContext& ctx, double beta, double t_total);

// Candidate allocations for decoding order 1 at fixed (beta, t_r): the
// unconstrained and cap-tight two-phase solutions, pure NOMA, and OMA,
// each only when its feasibility threshold holds. May be empty when P_m
// cannot carry U_m's own task.
std::vector<AllocationResult> power_alloc_case1(const PairContext& ctx, double beta,
                                                double t_r);

// Same for decoding order 0: two-phase solution under its threshold,
// pure NOMA unconditionally, OMA whenever t_r > 0. Never empty.
std::vector<AllocationResult> power_alloc_case0(const PairContext& ctx, double beta,
                                                double t_r);

// Energy is non-increasing in t_r for every branch, so the OMA phase
// takes all the slack: t_r* = tau_n - tau_m.
double optimal_time(const PairContext& ctx);

// Closed-form optimal offload fraction for the three two-phase branches
// (Lambert-W form), clamped to [0, 1]; evaluated at t_r = t_r_max.
// Throws std::invalid_argument for pure-NOMA/OMA tags.
double optimal_beta(const PairContext& ctx, const SchemeTag& scheme);

// E_loc + E_off for the allocation's (P_n, P_r, t_r, beta).
double total_energy(const PairContext& ctx, const AllocationResult& alloc);

// Branch energy at (beta, t_r) as a scalar, +inf where the branch's
// formulas are undefined. Exposed for curve checks and derivative probes.
double branch_energy(const PairContext& ctx, const SchemeTag& scheme, double beta,
                     double t_r);

// The two-phase candidates at their closed-form beta* (threshold-checked),
// in deterministic order: (1, unconstrained), (1, boundary), (0, unconstrained).
std::vector<AllocationResult> closed_form_hybrid_candidates(const PairContext& ctx);

enum class SolveRestriction {
  None,               // full scheduler
  FullOffload,        // beta forced to 1
  FixedDecodeNFirst,  // decoding order fixed to 0
  OmaOnly             // U_n confined to the OMA phase
};

struct SolveOptions {
  SolveRestriction restriction = SolveRestriction::None;
  // When the winner uses decoding order 0, also check whether U_m could
  // still decode interference-free in time, and warn if not. Off by
  // default: order 0 deliberately drops that constraint.
  bool strict_primary_check = false;
};

// Global minimum-energy allocation over both decoding orders. Hybrid
// branches use the closed-form beta*; pure-NOMA/OMA branches use a
// golden-section search (tolerance 1e-9). Ties break toward order 1 and
// the scheme order hybrid, pure, OMA. Deterministic.
AllocationResult solve_pair(const PairContext& ctx, const SolveOptions& opts = {});

// Brute-force reference: scans a (beta, t_r) grid (endpoints included),
// computes minimal feasible powers at each point by bisecting the rate
// constraints for both decoding orders, then refines once around the
// incumbent. resolution >= 32.
AllocationResult grid_oracle(const PairContext& ctx, int resolution = 128);

// Multipliers are reconstructed from the branch's active set, then
// stationarity, complementarity and primal feasibility are evaluated.
// Supports the two-phase branches only.
KktResidual kkt_residual(const PairContext& ctx, const AllocationResult& alloc);

// Full-offload energy gap between decoding orders, E(order 0) - E(order 1),
// defined for P_m inside the window where order 1 is feasible and order 0
// stays cheaper to bound. Throws std::invalid_argument outside it.
double lemma1_gap(const PairContext& ctx);

// Minimizes a strictly unimodal f on [lo, hi] to within xtol.
double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          double xtol);

}  // namespace nomamec
