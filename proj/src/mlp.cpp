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

#include "nomamec/mlp.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace nomamec {
namespace {

void check_dims(const std::vector<int>& dims) {
  if (dims.size() < 2) throw std::invalid_argument("QNetwork: need at least two layers");
  for (int d : dims)
    if (d <= 0) throw std::invalid_argument("QNetwork: layer sizes must be positive");
}

void check_input(const QNetwork& net, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != net.input_size())
    throw std::invalid_argument("forward: input size mismatch");
}

// Pre-activations for every layer; activations applied on top.
struct ForwardTrace {
  std::vector<std::vector<double>> pre;    // per layer, before activation
  std::vector<std::vector<double>> act;    // act[0] = input, act[l+1] = layer l output
};

ForwardTrace forward_trace(const QNetwork& net, const std::vector<double>& x) {
  ForwardTrace t;
  t.act.push_back(x);
  std::size_t layers = net.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    int rows = net.dims[l + 1], cols = net.dims[l];
    const auto& w = net.weights[l];
    const auto& in = t.act.back();
    std::vector<double> z(rows);
    for (int r = 0; r < rows; ++r) {
      double s = net.biases[l][r];
      const double* wr = w.data() + static_cast<std::size_t>(r) * cols;
      for (int c = 0; c < cols; ++c) s += wr[c] * in[c];
      z[r] = s;
    }
    t.pre.push_back(z);
    std::vector<double> a(rows);
    bool last = l + 1 == layers;
    for (int r = 0; r < rows; ++r)
      a[r] = last ? std::tanh(z[r]) : std::max(0.0, z[r]);
    t.act.push_back(std::move(a));
  }
  return t;
}

}  // namespace

QNetwork QNetwork::zeros(const std::vector<int>& dims) {
  check_dims(dims);
  QNetwork net;
  net.dims = dims;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    net.weights.emplace_back(static_cast<std::size_t>(dims[l + 1]) * dims[l], 0.0);
    net.biases.emplace_back(dims[l + 1], 0.0);
  }
  return net;
}

QNetwork QNetwork::init(const std::vector<int>& dims, Rng& rng) {
  QNetwork net = zeros(dims);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    double bound = std::sqrt(6.0 / dims[l]);
    for (double& w : net.weights[l]) w = rng.uniform(-bound, bound);
  }
  return net;
}

std::vector<double> forward(const QNetwork& net, const std::vector<double>& x) {
  check_input(net, x);
  return forward_trace(net, x).act.back();
}

std::pair<double, Gradients> loss_and_gradients(const QNetwork& net, const Batch& batch) {
  std::size_t n = batch.states.size();
  if (batch.actions.size() != n || batch.targets.size() != n)
    throw std::invalid_argument("loss_and_gradients: batch vectors disagree in size");
  if (n == 0) throw std::invalid_argument("loss_and_gradients: empty batch");

  Gradients g;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    g.weights.emplace_back(net.weights[l].size(), 0.0);
    g.biases.emplace_back(net.biases[l].size(), 0.0);
  }

  double loss = 0.0;
  std::size_t layers = net.weights.size();
  for (std::size_t i = 0; i < n; ++i) {
    check_input(net, batch.states[i]);
    int action = batch.actions[i];
    if (action < 0 || action >= net.output_size())
      throw std::invalid_argument("loss_and_gradients: action index out of range");

    ForwardTrace t = forward_trace(net, batch.states[i]);
    double q = t.act.back()[action];
    double err = q - batch.targets[i];
    loss += err * err;

    // dL/dq for this sample, pushed back through tanh then the ReLU stack.
    std::vector<double> delta(net.output_size(), 0.0);
    double y = t.act.back()[action];
    delta[action] = (2.0 / n) * err * (1.0 - y * y);
    for (std::size_t l = layers; l-- > 0;) {
      int rows = net.dims[l + 1], cols = net.dims[l];
      const auto& in = t.act[l];
      auto& gw = g.weights[l];
      for (int r = 0; r < rows; ++r) {
        double d = delta[r];
        if (d == 0.0) continue;
        g.biases[l][r] += d;
        double* gr = gw.data() + static_cast<std::size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) gr[c] += d * in[c];
      }
      if (l == 0) break;
      std::vector<double> prev(cols, 0.0);
      const auto& w = net.weights[l];
      for (int r = 0; r < rows; ++r) {
        double d = delta[r];
        if (d == 0.0) continue;
        const double* wr = w.data() + static_cast<std::size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) prev[c] += d * wr[c];
      }
      for (int c = 0; c < cols; ++c)
        if (t.pre[l - 1][c] <= 0.0) prev[c] = 0.0;
      delta = std::move(prev);
    }
  }
  return {loss / n, std::move(g)};
}

AdamState AdamState::like(const QNetwork& net) {
  AdamState s;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    s.m_w.emplace_back(net.weights[l].size(), 0.0);
    s.v_w.emplace_back(net.weights[l].size(), 0.0);
    s.m_b.emplace_back(net.biases[l].size(), 0.0);
    s.v_b.emplace_back(net.biases[l].size(), 0.0);
  }
  return s;
}

void adam_step(AdamState& state, QNetwork& net, const Gradients& grads, double lr) {
  if (state.m_w.size() != net.weights.size())
    throw std::invalid_argument("adam_step: state does not match the network");
  state.step_count += 1;
  double bc1 = 1.0 - std::pow(state.beta1, state.step_count);
  double bc2 = 1.0 - std::pow(state.beta2, state.step_count);
  auto update = [&](std::vector<double>& p, const std::vector<double>& g,
                    std::vector<double>& m, std::vector<double>& v) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + state.epsilon);
    }
  };
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    update(net.weights[l], grads.weights[l], state.m_w[l], state.v_w[l]);
    update(net.biases[l], grads.biases[l], state.m_b[l], state.v_b[l]);
  }
}

void save_qnetwork(const QNetwork& net, const std::string& path) {
  nlohmann::ordered_json j;
  j["format"] = "qnetwork";
  j["version"] = 1;
  j["dims"] = net.dims;
  j["weights"] = net.weights;
  j["biases"] = net.biases;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_qnetwork: cannot open " + path);
  out << j.dump(2) << "\n";
}

QNetwork load_qnetwork(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_qnetwork: cannot open " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "qnetwork" || j.value("version", 0) != 1)
    throw std::runtime_error("load_qnetwork: unrecognized container in " + path);

  QNetwork net;
  net.dims = j.at("dims").get<std::vector<int>>();
  check_dims(net.dims);
  net.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  net.biases = j.at("biases").get<std::vector<std::vector<double>>>();
  if (net.weights.size() + 1 != net.dims.size() || net.biases.size() != net.weights.size())
    throw std::runtime_error("load_qnetwork: layer count mismatch in " + path);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    std::size_t expect = static_cast<std::size_t>(net.dims[l + 1]) * net.dims[l];
    if (net.weights[l].size() != expect ||
        net.biases[l].size() != static_cast<std::size_t>(net.dims[l + 1]))
      throw std::runtime_error("load_qnetwork: layer shape mismatch in " + path);
  }
  return net;
}

}  // namespace nomamec
