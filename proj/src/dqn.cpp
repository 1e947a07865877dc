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

#include "nomamec/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nomamec {
namespace {

constexpr int kCalibrationSteps = 200;

// Stream ids for the independent random sources hanging off learn_seed.
enum : std::uint64_t {
  kStreamCalibration = 1,
  kStreamInit = 2,
  kStreamPolicy = 3,
  kStreamSample = 4,
};

}  // namespace

void HyperParams::validate() const {
  auto bad = [](const char* what) { throw std::invalid_argument(what); };
  if (!(eps_lo >= 0.0 && eps_hi <= 1.0 && eps_lo <= eps_hi))
    bad("HyperParams: need 0 <= eps_lo <= eps_hi <= 1");
  if (eps_decay_steps <= 0) bad("HyperParams: eps_decay_steps must be positive");
  if (!(epsilon_fixed >= 0.0 && epsilon_fixed <= 1.0))
    bad("HyperParams: epsilon_fixed outside [0, 1]");
  if (!(gamma >= 0.0 && gamma < 1.0)) bad("HyperParams: gamma outside [0, 1)");
  if (replay_capacity <= 0) bad("HyperParams: replay_capacity must be positive");
  if (batch_size <= 0 || batch_size > replay_capacity)
    bad("HyperParams: batch_size must be in [1, replay_capacity]");
  if (target_update <= 0) bad("HyperParams: target_update must be positive");
  if (episodes <= 0 || steps_per_episode <= 0)
    bad("HyperParams: episodes and steps_per_episode must be positive");
  if (!(learning_rate > 0.0)) bad("HyperParams: learning_rate must be positive");
  if (hidden1 <= 0 || hidden2 <= 0) bad("HyperParams: hidden sizes must be positive");
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayMemory: capacity must be positive");
  buffer_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayMemory::push(Transition t) {
  if (buffer_.size() < capacity_) {
    buffer_.push_back(std::move(t));
  } else {
    buffer_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
  }
  total_pushes_ += 1;
}

std::size_t ReplayMemory::index(std::size_t i) const {
  return buffer_.size() < capacity_ ? i : (head_ + i) % capacity_;
}

std::vector<std::size_t> ReplayMemory::sample_indices(Rng& rng, std::size_t count) const {
  if (buffer_.empty()) throw std::invalid_argument("ReplayMemory: sampling from empty buffer");
  std::vector<std::size_t> out(count);
  for (auto& i : out) i = static_cast<std::size_t>(rng.below(buffer_.size()));
  return out;
}

double epsilon_at(long step, const HyperParams& hp) {
  if (step >= hp.eps_decay_steps) return hp.eps_lo;
  if (step < 0) return hp.eps_hi;
  return hp.eps_hi + (hp.eps_lo - hp.eps_hi) * static_cast<double>(step) /
                         static_cast<double>(hp.eps_decay_steps);
}

int select_action(const std::vector<double>& q, double epsilon, Rng& rng) {
  if (q.empty()) throw std::invalid_argument("select_action: empty value vector");
  double roll = rng.uniform01();
  if (roll < epsilon) return static_cast<int>(rng.below(q.size()));
  int best = 0;
  for (int i = 1; i < static_cast<int>(q.size()); ++i)
    if (q[i] > q[best]) best = i;
  return best;
}

std::vector<double> compute_targets(const std::vector<const Transition*>& batch,
                                    const QNetwork& target_net, double gamma) {
  std::vector<double> out;
  out.reserve(batch.size());
  for (const Transition* t : batch) {
    std::vector<double> q = forward(target_net, t->next_state);
    double best = q.front();
    for (double v : q) best = std::max(best, v);
    out.push_back(t->reward + gamma * best);
  }
  return out;
}

void sync_target(const QNetwork& online, QNetwork& target) { target = online; }

std::vector<double> StateNormalizer::normalize(const GroupingState& state) const {
  std::size_t k = state.gains.size();
  if (state.deadlines.size() != k)
    throw std::invalid_argument("StateNormalizer: state vectors disagree in size");
  std::vector<double> out;
  out.reserve(2 * k);
  double sd = gain_log10_std > 1e-9 ? gain_log10_std : 1.0;
  for (double g : state.gains) out.push_back((std::log10(g) - gain_log10_mean) / sd);
  double span = deadline_max_s - deadline_min_s;
  for (double d : state.deadlines)
    out.push_back(span > 0.0 ? 2.0 * (d - deadline_min_s) / span - 1.0 : 0.0);
  return out;
}

GroupingEnv::GroupingEnv(const SystemParams& params, int num_users, std::uint64_t seed)
    : params_(params), num_users_(num_users), seed_(seed), episode_rng_(seed) {
  params_.validate();
  pairing_count(num_users);  // range check: even, [2, 12]
  begin_episode(0);
}

void GroupingEnv::begin_episode(int episode) {
  episode_rng_ = Rng(derive_seed(seed_, {static_cast<std::uint64_t>(episode)}));
  double r2min = params_.cell_radius_min_m * params_.cell_radius_min_m;
  double r2max = params_.cell_radius_max_m * params_.cell_radius_max_m;
  distances_.resize(num_users_);
  for (double& d : distances_)
    d = std::sqrt(episode_rng_.uniform01() * (r2max - r2min) + r2min);
  advance();
}

void GroupingEnv::advance() { state_ = next_state(episode_rng_, params_, distances_); }

TrainResult train(GroupingEnv& env, const HyperParams& hp, std::uint64_t learn_seed) {
  hp.validate();
  const int k = env.num_users();
  const int actions = static_cast<int>(pairing_count(k));
  const SystemParams& params = env.params();

  // Calibration pass: a short random-policy rollout fixes the reward scale
  // and the gain standardization before any learning happens.
  TrainResult result;
  {
    Rng cal_rng(derive_seed(learn_seed, {kStreamCalibration}));
    env.begin_episode(0);
    double energy_sum = 0.0;
    double log_sum = 0.0, log_sq_sum = 0.0;
    long log_count = 0;
    for (int step = 0; step < kCalibrationSteps; ++step) {
      const GroupingState& s = env.state();
      for (double g : s.gains) {
        double lg = std::log10(g);
        log_sum += lg;
        log_sq_sum += lg * lg;
        log_count += 1;
      }
      energy_sum += grouping_energy(s, random_pairing(cal_rng, k), params);
      env.advance();
    }
    result.reward_scale_j = energy_sum / kCalibrationSteps;
    double mean = log_sum / log_count;
    double var = std::max(0.0, log_sq_sum / log_count - mean * mean);
    result.normalizer.gain_log10_mean = mean;
    result.normalizer.gain_log10_std = std::max(1e-9, std::sqrt(var));
    result.normalizer.deadline_min_s = params.deadline_min_s;
    result.normalizer.deadline_max_s = params.deadline_max_s;
  }
  const StateNormalizer& norm = result.normalizer;
  const double e_ref = std::max(result.reward_scale_j, 1e-300);

  Rng init_rng(derive_seed(learn_seed, {kStreamInit}));
  std::vector<int> dims = {2 * k, hp.hidden1, hp.hidden2, actions};
  QNetwork net = QNetwork::init(dims, init_rng);
  QNetwork target = net;
  AdamState adam = AdamState::like(net);
  ReplayMemory replay(static_cast<std::size_t>(hp.replay_capacity));

  Rng policy_rng(derive_seed(learn_seed, {kStreamPolicy}));
  Rng sample_rng(derive_seed(learn_seed, {kStreamSample}));

  long env_steps = 0;
  long learn_steps = 0;
  for (int episode = 0; episode < hp.episodes; ++episode) {
    env.begin_episode(episode);
    std::vector<double> s_norm = norm.normalize(env.state());
    double ep_energy = 0.0;
    double ep_loss = 0.0;
    long ep_loss_count = 0;
    double ep_epsilon =
        hp.epsilon_decay ? epsilon_at(env_steps, hp) : hp.epsilon_fixed;

    for (int step = 0; step < hp.steps_per_episode; ++step) {
      double eps = hp.epsilon_decay ? epsilon_at(env_steps, hp) : hp.epsilon_fixed;
      std::vector<double> q = forward(net, s_norm);
      int action = select_action(q, eps, policy_rng);

      double energy =
          grouping_energy(env.state(), action_to_pairing(action, k), params);
      // The 1 - gamma factor keeps discounted returns, not just single
      // rewards, inside the tanh output range of the network.
      double reward =
          std::clamp(-(1.0 - hp.gamma) * energy / e_ref, -1.0, 1.0);
      env.advance();
      std::vector<double> s2_norm = norm.normalize(env.state());
      replay.push({s_norm, action, reward, s2_norm});

      if (replay.size() >= static_cast<std::size_t>(hp.batch_size)) {
        auto idx = replay.sample_indices(sample_rng, hp.batch_size);
        std::vector<const Transition*> picked;
        picked.reserve(idx.size());
        for (std::size_t i : idx) picked.push_back(&replay.at(i));
        Batch batch;
        batch.targets = compute_targets(picked, target, hp.gamma);
        for (const Transition* t : picked) {
          batch.states.push_back(t->state);
          batch.actions.push_back(t->action);
        }
        auto [loss, grads] = loss_and_gradients(net, batch);
        adam_step(adam, net, grads, hp.learning_rate);
        ep_loss += loss;
        ep_loss_count += 1;
        learn_steps += 1;
        if (learn_steps % hp.target_update == 0) sync_target(net, target);
      }

      ep_energy += energy;
      s_norm = std::move(s2_norm);
      env_steps += 1;
    }

    EpisodeStats stats;
    stats.episode = episode;
    stats.mean_energy_j = ep_energy / hp.steps_per_episode;
    stats.epsilon = ep_epsilon;
    stats.loss_mean = ep_loss_count > 0 ? ep_loss / ep_loss_count : 0.0;
    result.log.push_back(stats);
  }

  result.net = std::move(net);
  result.target_net = std::move(target);
  return result;
}

double random_policy_mean_energy(const SystemParams& params, int num_users,
                                 std::uint64_t env_seed, const HyperParams& hp,
                                 int first_episode, int last_episode,
                                 std::uint64_t policy_seed) {
  hp.validate();
  if (first_episode > last_episode)
    throw std::invalid_argument("random_policy_mean_energy: empty episode window");
  GroupingEnv env(params, num_users, env_seed);
  Rng rng(policy_seed);
  double total = 0.0;
  long count = 0;
  for (int episode = first_episode; episode <= last_episode; ++episode) {
    env.begin_episode(episode);
    for (int step = 0; step < hp.steps_per_episode; ++step) {
      total += grouping_energy(env.state(), random_pairing(rng, num_users), params);
      env.advance();
      count += 1;
    }
  }
  return total / count;
}

double exhaustive_mean_energy(const SystemParams& params, int num_users,
                              std::uint64_t env_seed, const HyperParams& hp,
                              int first_episode, int last_episode) {
  hp.validate();
  if (first_episode > last_episode)
    throw std::invalid_argument("exhaustive_mean_energy: empty episode window");
  GroupingEnv env(params, num_users, env_seed);
  double total = 0.0;
  long count = 0;
  for (int episode = first_episode; episode <= last_episode; ++episode) {
    env.begin_episode(episode);
    for (int step = 0; step < hp.steps_per_episode; ++step) {
      total += exhaustive_best(env.state(), params).second;
      env.advance();
      count += 1;
    }
  }
  return total / count;
}

}  // namespace nomamec
