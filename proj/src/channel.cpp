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

#include "nomamec/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nomamec {
namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw std::invalid_argument(field + ": " + what);
}

}  // namespace

void SystemParams::validate() const {
  require(bandwidth_hz > 0.0, "bandwidth_hz", "must be positive");
  require(pathloss_exponent > 0.0, "pathloss_exponent", "must be positive");
  require(std::isfinite(noise_psd_dbm_hz), "noise_psd_dbm_hz", "must be finite");
  require(cell_radius_min_m > 0.0, "cell_radius_min_m", "must be positive");
  require(cell_radius_max_m > cell_radius_min_m, "cell_radius_max_m",
          "must exceed cell_radius_min_m");
  require(kappa0 > 0.0, "kappa0", "must be positive");
  require(cycles_per_bit > 0.0, "cycles_per_bit", "must be positive");
  require(task_bits > 0.0, "task_bits", "must be positive");
  require(primary_power_w > 0.0, "primary_power_w", "must be positive");
  require(deadline_min_s > 0.0, "deadline_min_s", "must be positive");
  require(deadline_max_s >= deadline_min_s, "deadline_max_s",
          "must be >= deadline_min_s");
}

double SystemParams::noise_power_w() const {
  return noise_power(noise_psd_dbm_hz, bandwidth_hz);
}

double SystemParams::effective_bandwidth_hz() const {
  return rate_in_bits ? bandwidth_hz / M_LN2 : bandwidth_hz;
}

double noise_power(double noise_psd_dbm_hz, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0))
    throw std::invalid_argument("noise_power: bandwidth must be positive");
  if (!std::isfinite(noise_psd_dbm_hz))
    throw std::invalid_argument("noise_power: noise density must be finite");
  // dBm/Hz -> W/Hz, times bandwidth.
  return std::pow(10.0, (noise_psd_dbm_hz - 30.0) / 10.0) * bandwidth_hz;
}

std::vector<UserProfile> sample_users(Rng& rng, int num_users, const SystemParams& params) {
  if (num_users < 2 || num_users % 2 != 0)
    throw std::invalid_argument("sample_users: user count must be even and >= 2");
  params.validate();
  std::vector<UserProfile> users(num_users);
  const double r2min = params.cell_radius_min_m * params.cell_radius_min_m;
  const double r2max = params.cell_radius_max_m * params.cell_radius_max_m;
  for (int i = 0; i < num_users; ++i) {
    users[i].user_id = i;
    // Uniform by area over the annulus.
    users[i].distance_m = std::sqrt(rng.uniform01() * (r2max - r2min) + r2min);
    users[i].deadline_s = rng.uniform(params.deadline_min_s, params.deadline_max_s);
    users[i].fading = rng.complex_normal();
  }
  return users;
}

double channel_gain(const UserProfile& user, const SystemParams& params) {
  if (!(user.distance_m > 0.0))
    throw std::invalid_argument("channel_gain: distance must be positive");
  double power_gain = std::norm(user.fading) *
                      std::pow(user.distance_m, -params.pathloss_exponent);
  return power_gain / params.noise_power_w();
}

GroupingState next_state(Rng& rng, const SystemParams& params,
                         const std::vector<double>& distances_m) {
  if (distances_m.empty())
    throw std::invalid_argument("next_state: empty geometry");
  GroupingState state;
  state.gains.reserve(distances_m.size());
  state.deadlines.reserve(distances_m.size());
  UserProfile u;
  for (std::size_t i = 0; i < distances_m.size(); ++i) {
    u.user_id = static_cast<int>(i);
    u.distance_m = distances_m[i];
    u.deadline_s = rng.uniform(params.deadline_min_s, params.deadline_max_s);
    u.fading = rng.complex_normal();
    state.gains.push_back(channel_gain(u, params));
    state.deadlines.push_back(u.deadline_s);
  }
  return state;
}

}  // namespace nomamec
