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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "nomamec/mlp.hpp"

using namespace nomamec;

namespace {

// Perturbs one parameter and returns the batch loss.
double loss_at(QNetwork net, const Batch& batch, std::size_t layer, std::size_t idx,
               bool bias, double delta) {
  if (bias)
    net.biases[layer][idx] += delta;
  else
    net.weights[layer][idx] += delta;
  return loss_and_gradients(net, batch).first;
}

}  // namespace

TEST_CASE("forward pass on a hand-built net") {
  QNetwork net = QNetwork::zeros({2, 2, 1});
  net.weights[0] = {1.0, 0.0, 0.0, 1.0};
  net.biases[0] = {0.5, -0.5};
  net.weights[1] = {1.0, 1.0};
  auto y = forward(net, {1.0, 2.0});
  REQUIRE(y.size() == 1);
  // relu(1.5) + relu(1.5) = 3, squashed: tanh(3).
  CHECK(y[0] == doctest::Approx(0.99505475368673046).epsilon(1e-14));

  // A negative pre-activation is clipped to zero by the hidden layer.
  auto y2 = forward(net, {-10.0, 2.0});
  CHECK(y2[0] == doctest::Approx(std::tanh(1.5)).epsilon(1e-14));

  CHECK_THROWS_AS(forward(net, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(QNetwork::zeros({5}), std::invalid_argument);
}

TEST_CASE("outputs stay inside the unit interval") {
  Rng rng(3);
  QNetwork net = QNetwork::init({4, 16, 8, 3}, rng);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x = {rng.normal() * 10, rng.normal() * 10, rng.normal() * 10,
                             rng.normal() * 10};
    for (double q : forward(net, x)) {
      CHECK(q >= -1.0);
      CHECK(q <= 1.0);
    }
  }
}

TEST_CASE("initialization is bounded, zero-biased, and seeded") {
  Rng a(11), b(11);
  QNetwork n1 = QNetwork::init({6, 20, 10, 4}, a);
  QNetwork n2 = QNetwork::init({6, 20, 10, 4}, b);
  for (std::size_t l = 0; l < n1.weights.size(); ++l) {
    double bound = std::sqrt(6.0 / n1.dims[l]);
    for (std::size_t i = 0; i < n1.weights[l].size(); ++i) {
      CHECK(std::fabs(n1.weights[l][i]) <= bound);
      CHECK(n1.weights[l][i] == n2.weights[l][i]);
    }
    for (double bv : n1.biases[l]) CHECK(bv == 0.0);
  }
}

TEST_CASE("analytic gradients match central differences") {
  Rng rng(20240817);
  QNetwork net = QNetwork::init({3, 6, 5, 2}, rng);
  Batch batch;
  for (int i = 0; i < 4; ++i) {
    batch.states.push_back({rng.normal(), rng.normal(), rng.normal()});
    batch.actions.push_back(static_cast<int>(rng.below(2)));
    batch.targets.push_back(rng.uniform(-0.9, 0.9));
  }
  auto [loss, grads] = loss_and_gradients(net, batch);
  CHECK(loss >= 0.0);

  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    for (std::size_t i = 0; i < net.weights[l].size(); ++i) {
      double fd = (loss_at(net, batch, l, i, false, h) -
                   loss_at(net, batch, l, i, false, -h)) /
                  (2.0 * h);
      double g = grads.weights[l][i];
      double rel = std::fabs(fd - g) / std::max({1e-6, std::fabs(fd), std::fabs(g)});
      worst = std::max(worst, rel);
    }
    for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
      double fd = (loss_at(net, batch, l, i, true, h) -
                   loss_at(net, batch, l, i, true, -h)) /
                  (2.0 * h);
      double g = grads.biases[l][i];
      double rel = std::fabs(fd - g) / std::max({1e-6, std::fabs(fd), std::fabs(g)});
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("batch loss averages per-sample losses") {
  Rng rng(5);
  QNetwork net = QNetwork::init({2, 8, 4, 3}, rng);
  Batch both;
  both.states = {{0.3, -0.7}, {1.2, 0.4}};
  both.actions = {0, 2};
  both.targets = {0.1, -0.4};
  Batch first{{both.states[0]}, {both.actions[0]}, {both.targets[0]}};
  Batch second{{both.states[1]}, {both.actions[1]}, {both.targets[1]}};

  auto [lb, gb] = loss_and_gradients(net, both);
  auto [l1, g1] = loss_and_gradients(net, first);
  auto [l2, g2] = loss_and_gradients(net, second);
  CHECK(lb == doctest::Approx(0.5 * (l1 + l2)).epsilon(1e-13));
  for (std::size_t l = 0; l < gb.weights.size(); ++l)
    for (std::size_t i = 0; i < gb.weights[l].size(); ++i)
      CHECK(gb.weights[l][i] ==
            doctest::Approx(0.5 * (g1.weights[l][i] + g2.weights[l][i])).epsilon(1e-12));

  Batch bad = both;
  bad.actions = {0, 7};
  CHECK_THROWS_AS(loss_and_gradients(net, bad), std::invalid_argument);
  CHECK_THROWS_AS(loss_and_gradients(net, Batch{}), std::invalid_argument);
}

TEST_CASE("first optimizer step moves by the step size") {
  QNetwork net = QNetwork::zeros({2, 2, 1});
  AdamState adam = AdamState::like(net);
  Gradients g;
  g.weights = {{0.5, -0.25, 1.0, -2.0}, {3.0, -0.125}};
  g.biases = {{0.75, -0.5}, {0.25}};
  adam_step(adam, net, g, 0.01);
  CHECK(adam.step_count == 1);
  // With bias correction, step one is lr * g / (|g| + eps) = lr * sign(g).
  for (std::size_t l = 0; l < net.weights.size(); ++l)
    for (std::size_t i = 0; i < net.weights[l].size(); ++i)
      CHECK(net.weights[l][i] ==
            doctest::Approx(-0.01 * (g.weights[l][i] > 0 ? 1.0 : -1.0)).epsilon(1e-5));
}

TEST_CASE("a few hundred optimizer steps fit a fixed batch") {
  Rng rng(9);
  QNetwork net = QNetwork::init({2, 16, 8, 2}, rng);
  Batch batch;
  batch.states = {{0.2, 0.8}, {-0.5, 0.1}, {0.9, -0.9}, {-0.2, -0.3}};
  batch.actions = {0, 1, 0, 1};
  batch.targets = {0.6, -0.3, -0.7, 0.2};
  AdamState adam = AdamState::like(net);
  double initial = loss_and_gradients(net, batch).first;
  double final_loss = initial;
  for (int i = 0; i < 300; ++i) {
    auto [loss, grads] = loss_and_gradients(net, batch);
    adam_step(adam, net, grads, 0.01);
    final_loss = loss;
  }
  CHECK(final_loss < 0.05 * initial);
}

TEST_CASE("serialized networks round-trip exactly") {
  Rng rng(31);
  QNetwork net = QNetwork::init({3, 7, 5, 2}, rng);
  std::string path =
      (std::filesystem::temp_directory_path() / "nomamec_qnet_test.json").string();
  save_qnetwork(net, path);
  QNetwork back = load_qnetwork(path);
  CHECK(back.dims == net.dims);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    for (std::size_t i = 0; i < net.weights[l].size(); ++i)
      CHECK(back.weights[l][i] == net.weights[l][i]);
    for (std::size_t i = 0; i < net.biases[l].size(); ++i)
      CHECK(back.biases[l][i] == net.biases[l][i]);
  }
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_qnetwork("/nonexistent/qnet.json"), std::runtime_error);
}
