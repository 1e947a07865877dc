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

#include "nomamec/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>

#include "nomamec/lambertw.hpp"

namespace nomamec {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_exp(double x) { return x > 700.0 ? kInf : std::exp(x); }
double safe_expm1(double x) { return x > 700.0 ? kInf : std::expm1(x); }

// U_m's required SNR margin: it must push L nats through tau_m alone.
double decode_margin(const PairContext& c) { return safe_expm1(c.L / (c.B * c.tau_m)); }

AllocationResult make_result(const PairContext& ctx, SchemeTag tag, double p_n, double p_r,
                             double t_r, double beta) {
  AllocationResult r;
  r.scheme = tag;
  r.P_n = p_n;
  r.P_r = p_r;
  r.t_r = t_r;
  r.beta = beta;
  r.E_loc = local_energy(ctx, beta, ctx.tau_m + t_r);
  r.E_off = ctx.tau_m * p_n + t_r * p_r;
  r.E_tot = r.E_loc + r.E_off;
  return r;
}

void check_beta_time(const PairContext& ctx, double beta, double t_r) {
  if (!(beta >= -1e-12 && beta <= 1.0 + 1e-12))
    throw std::invalid_argument("power_alloc: beta outside [0, 1]");
  if (!(t_r >= -1e-12 && t_r <= ctx.t_r_max() + 1e-12))
    throw std::invalid_argument("power_alloc: t_r outside [0, tau_n - tau_m]");
}

struct GoldenFn {
  const std::function<double(double)>* f;
};

}  // namespace

void PairContext::validate() const {
  auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!pos(h_m) || !pos(h_n)) throw std::invalid_argument("PairContext: gains must be positive");
  if (!pos(tau_m) || !pos(tau_n) || tau_m > tau_n)
    throw std::invalid_argument("PairContext: need 0 < tau_m <= tau_n");
  if (!pos(P_m)) throw std::invalid_argument("PairContext: P_m must be positive");
  if (!pos(L) || !pos(B)) throw std::invalid_argument("PairContext: L and B must be positive");
  if (!pos(kappa0) || !pos(C))
    throw std::invalid_argument("PairContext: kappa0 and C must be positive");
}

double rate_uplink(double p_signal, double h_signal, double p_interf, double h_interf,
                   double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0))
    throw std::invalid_argument("rate_uplink: bandwidth must be positive");
  if (p_signal < 0.0 || p_interf < 0.0 || h_signal < 0.0 || h_interf < 0.0)
    throw std::invalid_argument("rate_uplink: powers and gains must be non-negative");
  return bandwidth_hz * std::log1p(p_signal * h_signal / (p_interf * h_interf + 1.0));
}

double local_energy(const PairContext& ctx, double beta, double t_total) {
  if (beta >= 1.0) return 0.0;
  if (!(t_total > 0.0))
    throw std::invalid_argument("local_energy: zero compute window with beta < 1");
  double work = ctx.C * (1.0 - beta) * ctx.L;
  return ctx.kappa0 * work * work * work / (t_total * t_total);
}

std::vector<AllocationResult> power_alloc_case1(const PairContext& ctx, double beta,
                                                double t_r) {
  ctx.validate();
  check_beta_time(ctx, beta, t_r);
  beta = std::clamp(beta, 0.0, 1.0);
  t_r = std::clamp(t_r, 0.0, ctx.t_r_max());

  const double g = decode_margin(ctx);
  const double x_m = ctx.P_m * ctx.h_m;
  std::vector<AllocationResult> out;

  // Two-phase, decode cap slack: equal powers across both phases.
  if (t_r > 0.0 && x_m > safe_exp(beta * ctx.L / (ctx.B * (ctx.tau_m + t_r))) * g) {
    double p = safe_expm1(beta * ctx.L / (ctx.B * (ctx.tau_m + t_r))) / ctx.h_n;
    out.push_back(make_result(ctx, {1, SchemeMode::HybridUnconstrained}, p, p, t_r, beta));
  }
  // Two-phase, decode cap tight: P_n pinned, the OMA phase carries the rest.
  if (t_r > 0.0 && g <= x_m && x_m <= safe_exp(beta * ctx.L / (ctx.B * ctx.tau_m)) * g) {
    double d = x_m / g;
    double p_n = (d - 1.0) / ctx.h_n;
    double p_r =
        safe_expm1(beta * ctx.L / (ctx.B * t_r) - (ctx.tau_m / t_r) * std::log(d)) / ctx.h_n;
    out.push_back(make_result(ctx, {1, SchemeMode::HybridBoundary}, p_n, p_r, t_r, beta));
  }
  // NOMA phase only.
  if (x_m >= safe_exp(beta * ctx.L / (ctx.B * ctx.tau_m)) * g) {
    double p_n = safe_expm1(beta * ctx.L / (ctx.B * ctx.tau_m)) / ctx.h_n;
    out.push_back(make_result(ctx, {1, SchemeMode::PureNoma}, p_n, 0.0, 0.0, beta));
  }
  // OMA phase only.
  if (t_r > 0.0 && x_m >= g) {
    double p_r = safe_expm1(beta * ctx.L / (ctx.B * t_r)) / ctx.h_n;
    out.push_back(make_result(ctx, {1, SchemeMode::Oma}, 0.0, p_r, t_r, beta));
  }
  return out;
}

std::vector<AllocationResult> power_alloc_case0(const PairContext& ctx, double beta,
                                                double t_r) {
  ctx.validate();
  check_beta_time(ctx, beta, t_r);
  beta = std::clamp(beta, 0.0, 1.0);
  t_r = std::clamp(t_r, 0.0, ctx.t_r_max());

  const double x_m = ctx.P_m * ctx.h_m;
  const double a = x_m + 1.0;  // U_m's interference while U_n is decoded first
  std::vector<AllocationResult> out;

  // Two-phase: valid while the NOMA-phase power stays non-negative.
  if (t_r > 0.0 && x_m <= safe_expm1(beta * ctx.L / (ctx.B * t_r))) {
    double w = ctx.tau_m + t_r;
    double expo = beta * ctx.L / (ctx.B * w) - t_r * std::log(a) / w;
    double p_n = a * safe_expm1(expo) / ctx.h_n;
    double p_r = safe_expm1(std::log(a) + expo) / ctx.h_n;
    out.push_back(make_result(ctx, {0, SchemeMode::HybridUnconstrained}, p_n, p_r, t_r, beta));
  }
  // NOMA phase only; always available since U_m's deadline is out of scope here.
  {
    double p_n = a * safe_expm1(beta * ctx.L / (ctx.B * ctx.tau_m)) / ctx.h_n;
    out.push_back(make_result(ctx, {0, SchemeMode::PureNoma}, p_n, 0.0, 0.0, beta));
  }
  if (t_r > 0.0) {
    double p_r = safe_expm1(beta * ctx.L / (ctx.B * t_r)) / ctx.h_n;
    out.push_back(make_result(ctx, {0, SchemeMode::Oma}, 0.0, p_r, t_r, beta));
  }
  return out;
}

double optimal_time(const PairContext& ctx) {
  ctx.validate();
  return ctx.t_r_max();
}

double optimal_beta(const PairContext& ctx, const SchemeTag& scheme) {
  ctx.validate();
  if (scheme.mode != SchemeMode::HybridUnconstrained &&
      scheme.mode != SchemeMode::HybridBoundary)
    throw std::invalid_argument("optimal_beta: closed form covers two-phase branches only");
  if (scheme.mode == SchemeMode::HybridBoundary && scheme.decode_m_first != 1)
    throw std::invalid_argument("optimal_beta: boundary branch exists for order 1 only");

  const double t_r = ctx.t_r_max();
  // Stationarity condition z1*(1-beta)^2 = e^{z2*(1-beta)}; solved by W0.
  // z1 is assembled in logs: its branch factors can overflow on their own.
  double log_z1 = std::log(3.0 * ctx.kappa0 * ctx.B * ctx.h_n) + 3.0 * std::log(ctx.C) +
                  2.0 * std::log(ctx.L) - 2.0 * std::log(ctx.tau_n);
  double z2;
  if (scheme.decode_m_first == 1 && scheme.mode == SchemeMode::HybridUnconstrained) {
    z2 = ctx.L / (ctx.B * ctx.tau_n);
  } else if (scheme.decode_m_first == 1) {
    if (!(t_r > 0.0))
      throw std::invalid_argument("optimal_beta: boundary branch needs tau_n > tau_m");
    double d = ctx.P_m * ctx.h_m / decode_margin(ctx);
    if (!(d > 0.0) || !std::isfinite(d))
      throw std::invalid_argument("optimal_beta: boundary branch undefined here");
    log_z1 += (ctx.tau_m / t_r) * std::log(d);
    z2 = ctx.L / (ctx.B * t_r);
  } else {
    double a = ctx.P_m * ctx.h_m + 1.0;
    log_z1 -= (ctx.tau_m / ctx.tau_n) * std::log(a);
    z2 = ctx.L / (ctx.B * ctx.tau_n);
  }
  double log_arg = std::log(0.5 * z2) + 0.5 * z2 - 0.5 * log_z1;
  double b = (2.0 / z2) * lambert_w0_exp(log_arg);
  return std::clamp(1.0 - b, 0.0, 1.0);
}

double total_energy(const PairContext& ctx, const AllocationResult& alloc) {
  return local_energy(ctx, alloc.beta, ctx.tau_m + alloc.t_r) +
         ctx.tau_m * alloc.P_n + alloc.t_r * alloc.P_r;
}

double branch_energy(const PairContext& ctx, const SchemeTag& scheme, double beta,
                     double t_r) {
  const double x_m = ctx.P_m * ctx.h_m;
  const double a = x_m + 1.0;
  switch (scheme.mode) {
    case SchemeMode::HybridUnconstrained: {
      if (!(t_r >= 0.0)) return kInf;
      double w = ctx.tau_m + t_r;
      if (scheme.decode_m_first == 1) {
        double p = safe_expm1(beta * ctx.L / (ctx.B * w)) / ctx.h_n;
        return local_energy(ctx, beta, w) + w * p;
      }
      double expo = beta * ctx.L / (ctx.B * w) - t_r * std::log(a) / w;
      double p_n = a * safe_expm1(expo) / ctx.h_n;
      double p_r = safe_expm1(std::log(a) + expo) / ctx.h_n;
      return local_energy(ctx, beta, w) + ctx.tau_m * p_n + t_r * p_r;
    }
    case SchemeMode::HybridBoundary: {
      if (scheme.decode_m_first != 1 || !(t_r > 0.0)) return kInf;
      double d = x_m / decode_margin(ctx);
      if (!(d > 0.0)) return kInf;
      double p_n = (d - 1.0) / ctx.h_n;
      double p_r =
          safe_expm1(beta * ctx.L / (ctx.B * t_r) - (ctx.tau_m / t_r) * std::log(d)) / ctx.h_n;
      return local_energy(ctx, beta, ctx.tau_m + t_r) + ctx.tau_m * p_n + t_r * p_r;
    }
    case SchemeMode::PureNoma: {
      double scale = scheme.decode_m_first == 1 ? 1.0 : a;
      double p_n = scale * safe_expm1(beta * ctx.L / (ctx.B * ctx.tau_m)) / ctx.h_n;
      return local_energy(ctx, beta, ctx.tau_m) + ctx.tau_m * p_n;
    }
    case SchemeMode::Oma: {
      if (!(t_r > 0.0)) return beta == 0.0 ? local_energy(ctx, 0.0, ctx.tau_m) : kInf;
      double p_r = safe_expm1(beta * ctx.L / (ctx.B * t_r)) / ctx.h_n;
      return local_energy(ctx, beta, ctx.tau_m + t_r) + t_r * p_r;
    }
  }
  return kInf;
}

double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          double xtol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

namespace {

// Picks the candidate with the given mode out of a power_alloc result.
std::optional<AllocationResult> pick_mode(const std::vector<AllocationResult>& cands,
                                          SchemeMode mode) {
  for (const auto& c : cands)
    if (c.scheme.mode == mode) return c;
  return std::nullopt;
}

std::optional<AllocationResult> golden_branch_candidate(
    const PairContext& ctx, SchemeTag tag, double t_r,
    const std::function<std::vector<AllocationResult>(double)>& alloc_at) {
  auto energy = [&](double beta) { return branch_energy(ctx, tag, beta, t_r); };
  double beta_hat = golden_section_min(energy, 0.0, 1.0, 1e-9);
  return pick_mode(alloc_at(beta_hat), tag.mode);
}

}  // namespace

std::vector<AllocationResult> closed_form_hybrid_candidates(const PairContext& ctx) {
  ctx.validate();
  const double t_r = ctx.t_r_max();
  std::vector<AllocationResult> out;
  if (!(t_r > 0.0)) return out;

  {
    SchemeTag tag{1, SchemeMode::HybridUnconstrained};
    double beta = optimal_beta(ctx, tag);
    if (auto c = pick_mode(power_alloc_case1(ctx, beta, t_r), tag.mode)) out.push_back(*c);
  }
  if (ctx.P_m * ctx.h_m >= decode_margin(ctx)) {
    SchemeTag tag{1, SchemeMode::HybridBoundary};
    double beta = optimal_beta(ctx, tag);
    if (auto c = pick_mode(power_alloc_case1(ctx, beta, t_r), tag.mode)) out.push_back(*c);
  }
  {
    SchemeTag tag{0, SchemeMode::HybridUnconstrained};
    double beta = optimal_beta(ctx, tag);
    if (auto c = pick_mode(power_alloc_case0(ctx, beta, t_r), tag.mode)) out.push_back(*c);
  }
  return out;
}

AllocationResult solve_pair(const PairContext& ctx, const SolveOptions& opts) {
  ctx.validate();
  const double t_r = ctx.t_r_max();
  const double x_m = ctx.P_m * ctx.h_m;
  const double g = decode_margin(ctx);

  auto case1_at = [&](double beta) { return power_alloc_case1(ctx, beta, t_r); };
  auto case0_at = [&](double beta) { return power_alloc_case0(ctx, beta, t_r); };

  // Candidates in tie-break order: order 1 then order 0, each as
  // two-phase, pure NOMA, OMA.
  std::vector<AllocationResult> cands;
  auto add = [&](std::optional<AllocationResult> c) {
    if (c) cands.push_back(*c);
  };

  const bool want_case1 = opts.restriction == SolveRestriction::None ||
                          opts.restriction == SolveRestriction::FullOffload;
  const bool want_case0 = opts.restriction == SolveRestriction::None ||
                          opts.restriction == SolveRestriction::FullOffload ||
                          opts.restriction == SolveRestriction::FixedDecodeNFirst;
  const bool beta_free = opts.restriction != SolveRestriction::FullOffload;

  if (opts.restriction == SolveRestriction::OmaOnly) {
    add(golden_branch_candidate(ctx, {1, SchemeMode::Oma}, t_r, case1_at));
    add(golden_branch_candidate(ctx, {0, SchemeMode::Oma}, t_r, case0_at));
    if (cands.empty()) {
      // tau_m == tau_n leaves no OMA phase; all-local is the fallback.
      cands.push_back(make_result(ctx, {0, SchemeMode::Oma}, 0.0, 0.0, 0.0, 0.0));
    }
  } else if (!beta_free) {
    if (want_case1)
      for (const auto& c : case1_at(1.0)) cands.push_back(c);
    if (want_case0)
      for (const auto& c : case0_at(1.0)) cands.push_back(c);
  } else {
    if (want_case1) {
      auto hybrids = closed_form_hybrid_candidates(ctx);
      for (const auto& c : hybrids)
        if (c.scheme.decode_m_first == 1) cands.push_back(c);
      auto pure = golden_branch_candidate(ctx, {1, SchemeMode::PureNoma}, t_r, case1_at);
      if (!pure && x_m >= g && std::isfinite(g)) {
        // Unconstrained argmin fell past U_m's decode threshold; the
        // constrained optimum sits where the threshold is tight.
        double beta_edge =
            std::clamp(ctx.B * ctx.tau_m / ctx.L * std::log(x_m / g), 0.0, 1.0);
        beta_edge = std::max(0.0, beta_edge - 1e-12);
        pure = pick_mode(case1_at(beta_edge), SchemeMode::PureNoma);
      }
      add(pure);
      add(golden_branch_candidate(ctx, {1, SchemeMode::Oma}, t_r, case1_at));
    }
    if (want_case0) {
      auto hybrids = closed_form_hybrid_candidates(ctx);
      for (const auto& c : hybrids)
        if (c.scheme.decode_m_first == 0) cands.push_back(c);
      add(golden_branch_candidate(ctx, {0, SchemeMode::PureNoma}, t_r, case0_at));
      add(golden_branch_candidate(ctx, {0, SchemeMode::Oma}, t_r, case0_at));
    }
  }

  const AllocationResult* best = nullptr;
  for (const auto& c : cands) {
    if (!best || c.E_tot < best->E_tot) best = &c;
  }
  if (!best) throw std::runtime_error("solve_pair: no feasible branch");

  if (opts.strict_primary_check && best->scheme.decode_m_first == 0) {
    double r_m = rate_uplink(ctx.P_m, ctx.h_m, 0.0, 0.0, ctx.B);
    if (ctx.tau_m * r_m < ctx.L)
      std::cerr << "solve_pair: warning: selected decode order leaves U_m "
                   "unable to finish within its deadline interference-free\n";
  }
  return *best;
}

namespace {

// Root of the increasing map p -> t*B*ln(1 + p*h) = target on [0, inf),
// by bracket doubling plus bisection. Returns nullopt when the target is
// unreachable below the power cap.
std::optional<double> invert_rate(double t, double h, double bandwidth, double target) {
  if (target <= 0.0) return 0.0;
  if (!(t > 0.0)) return std::nullopt;
  auto rate = [&](double p) { return t * bandwidth * std::log1p(p * h); };
  double hi = 1.0;
  int guard = 0;
  while (rate(hi) < target) {
    hi *= 2.0;
    if (hi > 1e18 || ++guard > 200) return std::nullopt;
  }
  double lo = hi > 1.0 ? hi / 2.0 : 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++i) {
    double mid = 0.5 * (lo + hi);
    (rate(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct OraclePoint {
  double cost = kInf;  // tau_m*P_n + t_r*P_r
  double p_n = 0.0;
  double p_r = 0.0;
};

// Minimal transmit energy at fixed (beta, t_r, order), powers found by
// bisecting the rate constraints; independent of the closed forms.
OraclePoint oracle_power_min(const PairContext& ctx, double beta, double t_r, int order) {
  OraclePoint out;
  const double x_m = ctx.P_m * ctx.h_m;
  const double interf = order == 0 ? x_m + 1.0 : 1.0;
  const double need = beta * ctx.L;

  // Order 1 caps P_n: U_m must still decode first in time.
  double cap = kInf;
  if (order == 1) {
    auto margin = [&](double p) {
      return ctx.tau_m * ctx.B * std::log1p(x_m / (p * ctx.h_n + 1.0)) - ctx.L;
    };
    if (margin(0.0) < 0.0) return out;  // infeasible at any P_n
    double hi = 1.0;
    int guard = 0;
    while (margin(hi) >= 0.0) {
      hi *= 2.0;
      if (hi > 1e18 || ++guard > 200) break;
    }
    if (margin(hi) >= 0.0) {
      cap = hi;
    } else {
      double lo = 0.0;
      for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++i) {
        double mid = 0.5 * (lo + hi);
        (margin(mid) >= 0.0 ? lo : hi) = mid;
      }
      cap = 0.5 * (lo + hi);
    }
  }

  auto p_r_needed = [&](double p_n) -> double {
    double rest = need - ctx.tau_m * ctx.B * std::log1p(p_n * ctx.h_n / interf);
    auto p = invert_rate(t_r, ctx.h_n, ctx.B, rest);
    return p ? *p : kInf;
  };
  auto cost = [&](double p_n) -> double {
    double p_r = p_r_needed(p_n);
    return std::isfinite(p_r) ? ctx.tau_m * p_n + t_r * p_r : kInf;
  };

  auto tight = invert_rate(ctx.tau_m, ctx.h_n / interf, ctx.B, need);
  double hi = std::min(cap, tight ? *tight : kInf);
  if (!std::isfinite(hi)) hi = cap;  // NOMA phase alone can't reach: ride the cap
  if (!std::isfinite(hi)) return out;

  double p_best = golden_section_min(cost, 0.0, hi, 1e-9 * std::max(1.0, hi));
  for (double p : {0.0, p_best, hi}) {
    double c = cost(p);
    if (c < out.cost) {
      out.cost = c;
      out.p_n = p;
      out.p_r = p_r_needed(p);
    }
  }
  return out;
}

struct OracleBest {
  double energy = kInf;
  double beta = 0.0, t_r = 0.0;
  double p_n = 0.0, p_r = 0.0;
  int order = 1;
};

void oracle_scan(const PairContext& ctx, int resolution, double beta_lo, double beta_hi,
                 double t_lo, double t_hi, bool order1_feasible, OracleBest& best) {
  const int n = resolution;
  for (int i = n - 1; i >= 0; --i) {
    double beta = n == 1 ? beta_lo : beta_lo + (beta_hi - beta_lo) * i / (n - 1);
    for (int j = n - 1; j >= 0; --j) {
      double t_r = n == 1 ? t_lo : t_lo + (t_hi - t_lo) * j / (n - 1);
      double e_loc = local_energy(ctx, beta, ctx.tau_m + t_r);
      // Interference-free equal-power transmission lower-bounds the
      // offload cost of every branch; skip cells that cannot win.
      double w = ctx.tau_m + t_r;
      double e_off_lb = w * safe_expm1(beta * ctx.L / (ctx.B * w)) / ctx.h_n;
      if (e_loc + e_off_lb >= best.energy) continue;
      for (int order : {1, 0}) {
        if (order == 1 && !order1_feasible) continue;
        OraclePoint p = oracle_power_min(ctx, beta, t_r, order);
        double e = e_loc + p.cost;
        if (e < best.energy) {
          best = {e, beta, t_r, p.p_n, p.p_r, order};
        }
      }
    }
  }
}

}  // namespace

AllocationResult grid_oracle(const PairContext& ctx, int resolution) {
  ctx.validate();
  if (resolution < 32) throw std::invalid_argument("grid_oracle: resolution must be >= 32");
  const double t_max = ctx.t_r_max();
  const bool order1_ok =
      ctx.tau_m * ctx.B * std::log1p(ctx.P_m * ctx.h_m) >= ctx.L;

  OracleBest best;
  oracle_scan(ctx, resolution, 0.0, 1.0, 0.0, t_max, order1_ok, best);

  // One refinement pass around the incumbent cell.
  double d_beta = 1.0 / (resolution - 1);
  double d_t = t_max / (resolution - 1);
  oracle_scan(ctx, resolution, std::max(0.0, best.beta - d_beta),
              std::min(1.0, best.beta + d_beta), std::max(0.0, best.t_r - d_t),
              std::min(t_max, best.t_r + d_t), order1_ok, best);

  AllocationResult r;
  r.scheme.decode_m_first = best.order;
  if (best.p_n > 0.0 && best.p_r > 0.0)
    r.scheme.mode = SchemeMode::HybridUnconstrained;
  else if (best.p_r > 0.0)
    r.scheme.mode = SchemeMode::Oma;
  else
    r.scheme.mode = SchemeMode::PureNoma;
  r.P_n = best.p_n;
  r.P_r = best.p_r;
  r.t_r = best.t_r;
  r.beta = best.beta;
  r.E_loc = local_energy(ctx, best.beta, ctx.tau_m + best.t_r);
  r.E_off = ctx.tau_m * best.p_n + best.t_r * best.p_r;
  r.E_tot = best.energy;
  return r;
}

KktResidual kkt_residual(const PairContext& ctx, const AllocationResult& alloc) {
  ctx.validate();
  const int order = alloc.scheme.decode_m_first;
  const SchemeMode mode = alloc.scheme.mode;
  if (mode != SchemeMode::HybridUnconstrained && mode != SchemeMode::HybridBoundary)
    throw std::invalid_argument("kkt_residual: two-phase branches only");
  if (mode == SchemeMode::HybridBoundary && order != 1)
    throw std::invalid_argument("kkt_residual: boundary branch exists for order 1 only");

  const double x_m = ctx.P_m * ctx.h_m;
  const double interf = order == 0 ? x_m + 1.0 : 1.0;
  const double t_r = alloc.t_r;
  const double p_n = alloc.P_n, p_r = alloc.P_r;

  // Active sets: powers strictly positive => their sign multipliers are 0;
  // the rate constraint is tight => lambda3 from the P_r stationarity; the
  // decode cap multiplier appears only on the boundary branch.
  double lambda1 = 0.0, lambda2 = 0.0;
  double lambda3 = (p_r * ctx.h_n + 1.0) / (ctx.B * ctx.h_n);
  double lambda4 = 0.0;
  if (mode == SchemeMode::HybridBoundary) {
    lambda4 = (lambda3 * ctx.tau_m * ctx.B * ctx.h_n / (p_n * ctx.h_n + 1.0) - ctx.tau_m) /
              ctx.h_n;
  }

  KktResidual res;
  double st_pn = ctx.tau_m - lambda1 -
                 lambda3 * ctx.tau_m * ctx.B * ctx.h_n / (p_n * ctx.h_n + interf);
  if (order == 1) st_pn += lambda4 * ctx.h_n;
  double st_pr = t_r - lambda2 - lambda3 * t_r * ctx.B * ctx.h_n / (p_r * ctx.h_n + 1.0);
  res.stationarity = {st_pn, st_pr};

  double rate_slack = alloc.beta * ctx.L -
                      ctx.tau_m * ctx.B * std::log1p(p_n * ctx.h_n / interf) -
                      t_r * ctx.B * std::log1p(p_r * ctx.h_n);
  res.complementarity = {lambda1 * p_n, lambda2 * p_r, lambda3 * rate_slack};
  res.primal_violation = {rate_slack, -p_n, -p_r};
  if (order == 1) {
    double cap_slack = p_n * ctx.h_n + 1.0 - x_m / decode_margin(ctx);
    res.complementarity.push_back(lambda4 * cap_slack);
    res.primal_violation.push_back(cap_slack);
  }
  return res;
}

double lemma1_gap(const PairContext& ctx) {
  ctx.validate();
  const double x_m = ctx.P_m * ctx.h_m;
  const double g = decode_margin(ctx);
  const double t_r = ctx.t_r_max();
  const double hi = t_r > 0.0 ? safe_expm1(ctx.L / (ctx.B * t_r)) : kInf;
  if (!(x_m >= g * (1.0 - 1e-12)) || !(x_m <= hi * (1.0 + 1e-12)))
    throw std::invalid_argument("lemma1_gap: P_m outside the comparison window");

  const double a = x_m + 1.0;
  // Full offload, order 1, cap slack: both phases at one power.
  double e1 = ctx.tau_n * safe_expm1(ctx.L / (ctx.B * ctx.tau_n)) / ctx.h_n;
  // Full offload, order 0 two-phase.
  double expo = ctx.L / (ctx.B * ctx.tau_n) - t_r * std::log(a) / ctx.tau_n;
  double e2 = ctx.tau_m * a * safe_expm1(expo) / ctx.h_n +
              t_r * safe_expm1(std::log(a) + expo) / ctx.h_n;
  return e2 - e1;
}

}  // namespace nomamec
