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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <stdexcept>

#include "nomamec/grouping.hpp"

using namespace nomamec;

namespace {

GroupingState uniform_state(int k, double gain, double deadline) {
  GroupingState s;
  s.gains.assign(k, gain);
  s.deadlines.assign(k, deadline);
  return s;
}

}  // namespace

TEST_CASE("matching counts are double factorials") {
  CHECK(pairing_count(2) == 1);
  CHECK(pairing_count(4) == 3);
  CHECK(pairing_count(6) == 15);
  CHECK(pairing_count(8) == 105);
  CHECK(pairing_count(10) == 945);
  CHECK(pairing_count(12) == 10395);
  CHECK_THROWS_AS(pairing_count(3), std::invalid_argument);
  CHECK_THROWS_AS(pairing_count(0), std::invalid_argument);
  CHECK_THROWS_AS(pairing_count(14), std::invalid_argument);
}

TEST_CASE("action enumeration is the canonical recursive order") {
  Pairing p0 = action_to_pairing(0, 4);
  REQUIRE(p0.pairs.size() == 2);
  CHECK(p0.pairs[0] == std::pair<int, int>(0, 1));
  CHECK(p0.pairs[1] == std::pair<int, int>(2, 3));
  Pairing p1 = action_to_pairing(1, 4);
  CHECK(p1.pairs[0] == std::pair<int, int>(0, 2));
  CHECK(p1.pairs[1] == std::pair<int, int>(1, 3));
  Pairing p2 = action_to_pairing(2, 4);
  CHECK(p2.pairs[0] == std::pair<int, int>(0, 3));
  CHECK(p2.pairs[1] == std::pair<int, int>(1, 2));
  CHECK_THROWS_AS(action_to_pairing(3, 4), std::invalid_argument);
}

TEST_CASE("encoding round-trips every matching") {
  for (int k : {2, 4, 6, 8}) {
    for (std::uint64_t a = 0; a < pairing_count(k); ++a) {
      Pairing p = action_to_pairing(a, k);
      CHECK(pairing_to_action(p) == a);
      // Every index appears exactly once.
      std::vector<int> seen(k, 0);
      for (auto [u, v] : p.pairs) {
        seen[u] += 1;
        seen[v] += 1;
      }
      for (int s : seen) CHECK(s == 1);
    }
  }
  Pairing bad;
  bad.pairs = {{0, 1}, {1, 2}};
  CHECK_THROWS_AS(pairing_to_action(bad), std::invalid_argument);
}

TEST_CASE("random matchings are valid and roughly uniform") {
  Rng rng(99);
  std::map<std::uint64_t, int> counts;
  const int draws = 3000;
  for (int i = 0; i < draws; ++i) counts[pairing_to_action(random_pairing(rng, 4))] += 1;
  REQUIRE(counts.size() == 3);
  for (const auto& [action, n] : counts) {
    CHECK(n > draws / 3 - 200);
    CHECK(n < draws / 3 + 200);
  }
}

TEST_CASE("shorter deadline takes the fixed-power role") {
  SystemParams params;
  GroupingState s;
  s.gains = {10.0, 20.0};
  s.deadlines = {0.28, 0.22};
  PairContext ctx = make_pair_context(s, 0, 1, params);
  CHECK(ctx.h_m == 20.0);
  CHECK(ctx.h_n == 10.0);
  CHECK(ctx.tau_m == 0.22);
  CHECK(ctx.tau_n == 0.28);
  CHECK(ctx.P_m == params.primary_power_w);
  CHECK(ctx.L == params.task_bits);
  CHECK(ctx.B == params.effective_bandwidth_hz());

  // Ties go to the lower index regardless of argument order.
  s.deadlines = {0.25, 0.25};
  PairContext tie = make_pair_context(s, 1, 0, params);
  CHECK(tie.h_m == 10.0);
  CHECK(tie.h_n == 20.0);

  CHECK_THROWS_AS(make_pair_context(s, 0, 0, params), std::invalid_argument);
  CHECK_THROWS_AS(make_pair_context(s, 0, 5, params), std::invalid_argument);
}

TEST_CASE("grouping energy sums per-pair scheduler minima") {
  SystemParams params;
  GroupingState s;
  s.gains = {3.0e6, 8.0e5, 5.0e6, 1.2e6};
  s.deadlines = {0.21, 0.27, 0.24, 0.29};
  Pairing p = action_to_pairing(0, 4);
  double expect = solve_pair(make_pair_context(s, 0, 1, params)).E_tot +
                  solve_pair(make_pair_context(s, 2, 3, params)).E_tot;
  CHECK(grouping_energy(s, p, params) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("exhaustive search dominates every matching") {
  SystemParams params;
  GroupingState s;
  s.gains = {3.0e6, 8.0e5, 5.0e6, 1.2e6, 2.2e6, 6.5e5};
  s.deadlines = {0.21, 0.27, 0.24, 0.29, 0.22, 0.26};
  auto [best, energy] = exhaustive_best(s, params);
  CHECK(energy == doctest::Approx(grouping_energy(s, best, params)).epsilon(1e-13));
  for (std::uint64_t a = 0; a < pairing_count(6); ++a)
    CHECK(energy <= grouping_energy(s, action_to_pairing(a, 6), params) + 1e-12);
}

TEST_CASE("exhaustive ties break to the lowest action") {
  SystemParams params;
  // Identical users make every matching equally good.
  GroupingState s = uniform_state(4, 2.0e6, 0.25);
  auto [best, energy] = exhaustive_best(s, params);
  CHECK(energy > 0.0);
  CHECK(pairing_to_action(best) == 0);
}

TEST_CASE("assignment matrix marks each pair's members") {
  Pairing p = action_to_pairing(1, 4);  // (0,2) (1,3)
  auto m = assignment_matrix(p);
  REQUIRE(m.size() == 2);
  REQUIRE(m[0].size() == 4);
  CHECK(m[0] == std::vector<int>{1, 0, 1, 0});
  CHECK(m[1] == std::vector<int>{0, 1, 0, 1});
}
