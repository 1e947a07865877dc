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
#include <vector>

#include "nomamec/channel.hpp"
#include "nomamec/grouping.hpp"
#include "nomamec/mlp.hpp"

namespace nomamec {

struct HyperParams {
  double eps_hi = 0.5;
  double eps_lo = 0.01;
  int eps_decay_steps = 2000;
  bool epsilon_decay = true;     // false: constant epsilon_fixed policy
  double epsilon_fixed = 0.1;
  double gamma = 0.7;
  int replay_capacity = 20000;
  int batch_size = 64;
  int target_update = 10;        // learning steps between target syncs
  int episodes = 150;
  int steps_per_episode = 500;
  double learning_rate = 0.01;
  int hidden1 = 200;
  int hidden2 = 100;

  void validate() const;
};

struct Transition {
  std::vector<double> state;      // normalized
  int action = 0;
  double reward = 0.0;            // scaled, |reward| <= 1
  std::vector<double> next_state; // normalized
};

// FIFO ring buffer.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);
  void push(Transition t);
  std::size_t size() const { return buffer_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t total_pushes() const { return total_pushes_; }
  const Transition& at(std::size_t i) const { return buffer_[index(i)]; }
  // `count` uniform draws with replacement.
  std::vector<std::size_t> sample_indices(Rng& rng, std::size_t count) const;

 private:
  std::size_t index(std::size_t i) const;
  std::size_t capacity_;
  std::size_t head_ = 0;          // next overwrite position once full
  std::uint64_t total_pushes_ = 0;
  std::vector<Transition> buffer_;
};

// Linear decay eps_hi -> eps_lo over eps_decay_steps env steps, constant
// afterwards (ignores the fixed-epsilon switch; callers pick the policy).
double epsilon_at(long step, const HyperParams& hp);

// Epsilon-greedy over q; greedy ties break to the lowest index.
int select_action(const std::vector<double>& q, double epsilon, Rng& rng);

// y_i = reward_i + gamma * max_a q_target(next_state_i)[a]. The task is
// continuing, so there is no terminal masking.
std::vector<double> compute_targets(const std::vector<const Transition*>& batch,
                                    const QNetwork& target_net, double gamma);

void sync_target(const QNetwork& online, QNetwork& target);

// Fixed affine maps into the net's working range: gains through log10
// then standardized by calibration constants, deadlines mapped from the
// configured range onto [-1, 1].
struct StateNormalizer {
  double gain_log10_mean = 0.0;
  double gain_log10_std = 1.0;
  double deadline_min_s = 0.2;
  double deadline_max_s = 0.3;

  std::vector<double> normalize(const GroupingState& state) const;
};

// Slot-state generator: distances are redrawn once per episode, fading
// and deadlines every step. The state sequence is a pure function of
// (seed, episode, step), so policies can be replayed on identical states.
class GroupingEnv {
 public:
  GroupingEnv(const SystemParams& params, int num_users, std::uint64_t seed);

  void begin_episode(int episode);
  void advance();

  const GroupingState& state() const { return state_; }
  const std::vector<double>& distances() const { return distances_; }
  const SystemParams& params() const { return params_; }
  int num_users() const { return num_users_; }
  std::uint64_t seed() const { return seed_; }

 private:
  SystemParams params_;
  int num_users_;
  std::uint64_t seed_;
  Rng episode_rng_;
  std::vector<double> distances_;
  GroupingState state_;
};

struct EpisodeStats {
  int episode = 0;
  double mean_energy_j = 0.0;
  double epsilon = 0.0;
  double loss_mean = 0.0;
};

struct TrainResult {
  QNetwork net;
  QNetwork target_net;
  StateNormalizer normalizer;
  double reward_scale_j = 0.0;        // calibration mean step energy
  std::vector<EpisodeStats> log;
};

// Deep Q-learning over pairing actions. Rewards are the negated slot
// energy divided by the random-policy calibration mean, clipped to
// [-1, 1]. Learning starts once the buffer holds a full batch; the
// target net syncs every `target_update` learning steps. Deterministic
// given (env seed, params, hp, learn_seed).
TrainResult train(GroupingEnv& env, const HyperParams& hp, std::uint64_t learn_seed);

// Mean slot energy of the uniform-random policy over the given episode
// window, replayed on the same env states as training with this seed.
double random_policy_mean_energy(const SystemParams& params, int num_users,
                                 std::uint64_t env_seed, const HyperParams& hp,
                                 int first_episode, int last_episode,
                                 std::uint64_t policy_seed);

// Mean slot energy of per-slot exhaustive matching over the window.
double exhaustive_mean_energy(const SystemParams& params, int num_users,
                              std::uint64_t env_seed, const HyperParams& hp,
                              int first_episode, int last_episode);

}  // namespace nomamec
