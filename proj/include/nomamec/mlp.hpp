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

#include <string>
#include <vector>

#include "nomamec/rng.hpp"

namespace nomamec {

// Fully connected ReLU net with a tanh output layer, stored flat
// row-major. dims = {input, hidden..., output}; weights[l] has shape
// dims[l+1] x dims[l].
struct QNetwork {
  std::vector<int> dims;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  static QNetwork zeros(const std::vector<int>& dims);
  // Zero biases, weights uniform in +-sqrt(6 / fan_in).
  static QNetwork init(const std::vector<int>& dims, Rng& rng);

  int input_size() const { return dims.front(); }
  int output_size() const { return dims.back(); }
};

// tanh(W_last * relu(... relu(W_0 x + b_0) ...) + b_last); outputs land
// in [-1, 1] (saturated pre-activations round to the endpoints).
std::vector<double> forward(const QNetwork& net, const std::vector<double>& x);

struct Batch {
  std::vector<std::vector<double>> states;
  std::vector<int> actions;      // output index each target refers to
  std::vector<double> targets;
};

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

// Mean squared error over the selected outputs:
//   (1/N) * sum_i (targets[i] - q(states[i])[actions[i]])^2
// with full backprop gradients. ReLU subgradient at 0 is 0.
std::pair<double, Gradients> loss_and_gradients(const QNetwork& net, const Batch& batch);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step_count = 0;
  std::vector<std::vector<double>> m_w, v_w, m_b, v_b;

  static AdamState like(const QNetwork& net);
};

// One bias-corrected Adam update of every parameter in place.
void adam_step(AdamState& state, QNetwork& net, const Gradients& grads, double lr);

// Versioned JSON container: layer dims header plus row-major arrays.
void save_qnetwork(const QNetwork& net, const std::string& path);
QNetwork load_qnetwork(const std::string& path);

}  // namespace nomamec
