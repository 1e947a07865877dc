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

#include <complex>
#include <vector>

#include "nomamec/rng.hpp"

namespace nomamec {

// Cell and workload parameters. Defaults describe a single-cell uplink:
// 2 MHz bandwidth, -174 dBm/Hz noise density, users dropped uniformly by
// area on an annulus between 50 m and 1 km, 2 Mbit tasks at 1000
// cycles/bit, and a 1 W transmit power for the delay-constrained user.
struct SystemParams {
  double bandwidth_hz = 2.0e6;
  double pathloss_exponent = 3.76;
  double noise_psd_dbm_hz = -174.0;
  double cell_radius_min_m = 50.0;
  double cell_radius_max_m = 1000.0;
  double kappa0 = 1.0e-28;           // CPU energy coefficient
  double cycles_per_bit = 1.0e3;
  double task_bits = 2.0e6;
  double primary_power_w = 1.0;      // fixed power of the short-deadline user
  double deadline_min_s = 0.2;
  double deadline_max_s = 0.3;
  bool rate_in_bits = false;         // default: rates in nats/s

  void validate() const;             // throws std::invalid_argument naming the field
  double noise_power_w() const;
  // ln-based solver formulas absorb a log2 rate convention as a
  // bandwidth rescale: B*log2(1+x) == (B/ln 2)*ln(1+x).
  double effective_bandwidth_hz() const;
};

struct UserProfile {
  int user_id = 0;
  double distance_m = 0.0;
  double deadline_s = 0.0;
  std::complex<double> fading;       // small-scale coefficient, CN(0,1)
};

// Per-slot observation of one cell: noise-normalized channel gains (1/W)
// and computing deadlines (s), indexed by user.
struct GroupingState {
  std::vector<double> gains;
  std::vector<double> deadlines;
};

// Thermal noise power (W) over `bandwidth_hz` at `noise_psd_dbm_hz`.
double noise_power(double noise_psd_dbm_hz, double bandwidth_hz);

// Draws K users: distance area-uniform on the annulus, deadline uniform
// in the deadline range, fading CN(0,1). K must be even and >= 2.
std::vector<UserProfile> sample_users(Rng& rng, int num_users, const SystemParams& params);

// |fading|^2 * d^(-alpha) / noise_power  [1/W]
double channel_gain(const UserProfile& user, const SystemParams& params);

// Next slot for a fixed geometry: fading and deadlines are redrawn,
// distances stay put.
GroupingState next_state(Rng& rng, const SystemParams& params,
                         const std::vector<double>& distances_m);

}  // namespace nomamec
