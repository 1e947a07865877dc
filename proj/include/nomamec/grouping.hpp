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
#include <utility>
#include <vector>

#include "nomamec/channel.hpp"
#include "nomamec/solver.hpp"

namespace nomamec {

// A perfect matching of user indices 0..K-1 into K/2 sub-channel pairs.
// Canonical form: pairs store (low, high) and are sorted by their low
// index. Which member plays the delay-constrained role is decided by
// deadline (shorter wins, ties to the lower index) when energies are
// evaluated, not here.
struct Pairing {
  std::vector<std::pair<int, int>> pairs;
  int num_users() const { return 2 * static_cast<int>(pairs.size()); }
};

// (K-1)!! perfect matchings for even K in [2, 12].
std::uint64_t pairing_count(int num_users);

// Canonical enumeration: recursively pair the lowest unpaired index with
// each remaining index in ascending order. Index must be < (K-1)!!.
Pairing action_to_pairing(std::uint64_t action, int num_users);
std::uint64_t pairing_to_action(const Pairing& pairing);

// Uniform over all (K-1)!! matchings.
Pairing random_pairing(Rng& rng, int num_users);

// Pair (u, v) from a slot state: the shorter-deadline user takes the
// fixed-power role.
PairContext make_pair_context(const GroupingState& state, int u, int v,
                              const SystemParams& params);

// Sum of per-pair scheduler minima; the training reward is its negative.
double grouping_energy(const GroupingState& state, const Pairing& pairing,
                       const SystemParams& params);

// Scans all matchings (per-pair energies memoized); ties break toward
// the lowest action index.
std::pair<Pairing, double> exhaustive_best(const GroupingState& state,
                                           const SystemParams& params);

// K/2 x K assignment matrix: row p has ones at the two users of pair p.
// Kept for experiment logs.
std::vector<std::vector<int>> assignment_matrix(const Pairing& pairing);

}  // namespace nomamec
