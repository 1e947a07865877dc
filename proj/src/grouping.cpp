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

#include "nomamec/grouping.hpp"

#include <algorithm>
#include <stdexcept>

namespace nomamec {
namespace {

void check_even_users(int num_users) {
  if (num_users < 2 || num_users > 12 || num_users % 2 != 0)
    throw std::invalid_argument("pairing: num_users must be even and in [2, 12]");
}

void canonicalize(Pairing& p) {
  for (auto& pr : p.pairs) {
    if (pr.first > pr.second) std::swap(pr.first, pr.second);
  }
  std::sort(p.pairs.begin(), p.pairs.end());
}

}  // namespace

std::uint64_t pairing_count(int num_users) {
  check_even_users(num_users);
  std::uint64_t n = 1;
  for (int k = num_users - 1; k > 1; k -= 2) n *= static_cast<std::uint64_t>(k);
  return n;
}

Pairing action_to_pairing(std::uint64_t action, int num_users) {
  check_even_users(num_users);
  if (action >= pairing_count(num_users))
    throw std::invalid_argument("action_to_pairing: action out of range");

  std::vector<int> pool(num_users);
  for (int i = 0; i < num_users; ++i) pool[i] = i;

  Pairing out;
  while (pool.size() > 1) {
    // The lowest unpaired index picks a partner; the remaining sub-problem
    // has (r-3)!! matchings per choice, so the action digit is a mixed-radix
    // division.
    std::uint64_t tail = pool.size() > 2
                             ? pairing_count(static_cast<int>(pool.size()) - 2)
                             : 1;
    std::uint64_t digit = action / tail;
    action %= tail;
    int low = pool[0];
    int partner = pool[1 + static_cast<int>(digit)];
    out.pairs.emplace_back(low, partner);
    pool.erase(pool.begin() + 1 + static_cast<int>(digit));
    pool.erase(pool.begin());
  }
  return out;
}

std::uint64_t pairing_to_action(const Pairing& pairing) {
  Pairing canon = pairing;
  canonicalize(canon);
  int num_users = canon.num_users();
  check_even_users(num_users);

  std::vector<int> pool(num_users);
  for (int i = 0; i < num_users; ++i) pool[i] = i;
  std::vector<char> seen(num_users, 0);
  for (const auto& pr : canon.pairs) {
    if (pr.first < 0 || pr.second >= num_users || pr.first == pr.second ||
        seen[pr.first] || seen[pr.second])
      throw std::invalid_argument("pairing_to_action: not a perfect matching");
    seen[pr.first] = seen[pr.second] = 1;
  }

  std::uint64_t action = 0;
  while (pool.size() > 1) {
    int low = pool[0];
    int partner = -1;
    for (const auto& pr : canon.pairs) {
      if (pr.first == low) {
        partner = pr.second;
        break;
      }
    }
    if (partner < 0) throw std::invalid_argument("pairing_to_action: not a perfect matching");
    auto it = std::find(pool.begin() + 1, pool.end(), partner);
    std::uint64_t digit = static_cast<std::uint64_t>(it - (pool.begin() + 1));
    std::uint64_t tail = pool.size() > 2
                             ? pairing_count(static_cast<int>(pool.size()) - 2)
                             : 1;
    action = action + digit * tail;
    pool.erase(it);
    pool.erase(pool.begin());
  }
  return action;
}

Pairing random_pairing(Rng& rng, int num_users) {
  check_even_users(num_users);
  return action_to_pairing(rng.below(pairing_count(num_users)), num_users);
}

PairContext make_pair_context(const GroupingState& state, int u, int v,
                              const SystemParams& params) {
  int k = static_cast<int>(state.gains.size());
  if (state.deadlines.size() != state.gains.size())
    throw std::invalid_argument("make_pair_context: state vectors disagree in size");
  if (u < 0 || v < 0 || u >= k || v >= k || u == v)
    throw std::invalid_argument("make_pair_context: bad user indices");

  // Shorter deadline takes the fixed-power slot; ties to the lower index.
  int m = u, n = v;
  if (state.deadlines[v] < state.deadlines[u] ||
      (state.deadlines[v] == state.deadlines[u] && v < u)) {
    m = v;
    n = u;
  }

  PairContext ctx;
  ctx.h_m = state.gains[m];
  ctx.h_n = state.gains[n];
  ctx.tau_m = state.deadlines[m];
  ctx.tau_n = state.deadlines[n];
  ctx.P_m = params.primary_power_w;
  ctx.L = params.task_bits;
  ctx.B = params.effective_bandwidth_hz();
  ctx.kappa0 = params.kappa0;
  ctx.C = params.cycles_per_bit;
  return ctx;
}

double grouping_energy(const GroupingState& state, const Pairing& pairing,
                       const SystemParams& params) {
  double total = 0.0;
  for (const auto& pr : pairing.pairs) {
    PairContext ctx = make_pair_context(state, pr.first, pr.second, params);
    total += solve_pair(ctx).E_tot;
  }
  return total;
}

std::pair<Pairing, double> exhaustive_best(const GroupingState& state,
                                           const SystemParams& params) {
  int k = static_cast<int>(state.gains.size());
  check_even_users(k);

  // Memoize the K*(K-1)/2 pair energies; every matching reads from here.
  std::vector<std::vector<double>> pair_energy(k, std::vector<double>(k, 0.0));
  for (int u = 0; u < k; ++u) {
    for (int v = u + 1; v < k; ++v) {
      PairContext ctx = make_pair_context(state, u, v, params);
      pair_energy[u][v] = solve_pair(ctx).E_tot;
    }
  }

  std::uint64_t count = pairing_count(k);
  std::uint64_t best_action = 0;
  double best_energy = 0.0;
  bool have = false;
  for (std::uint64_t a = 0; a < count; ++a) {
    Pairing p = action_to_pairing(a, k);
    double e = 0.0;
    for (const auto& pr : p.pairs) e += pair_energy[pr.first][pr.second];
    if (!have || e < best_energy) {
      have = true;
      best_energy = e;
      best_action = a;
    }
  }
  return {action_to_pairing(best_action, k), best_energy};
}

std::vector<std::vector<int>> assignment_matrix(const Pairing& pairing) {
  int k = pairing.num_users();
  std::vector<std::vector<int>> m(pairing.pairs.size(), std::vector<int>(k, 0));
  for (std::size_t row = 0; row < pairing.pairs.size(); ++row) {
    m[row][pairing.pairs[row].first] = 1;
    m[row][pairing.pairs[row].second] = 1;
  }
  return m;
}

}  // namespace nomamec
