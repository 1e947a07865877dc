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
#include <stdexcept>

#include "nomamec/lambertw.hpp"
#include "nomamec/rng.hpp"

using nomamec::lambert_w0;
using nomamec::lambert_w0_exp;

// Reference values computed with an independent high-precision bisection
// of w*e^w = x, frozen here.
TEST_CASE("principal branch reference points") {
  CHECK(lambert_w0(0.0) == 0.0);
  CHECK(lambert_w0(2.0) == doctest::Approx(0.8526055020137255).epsilon(1e-14));
  CHECK(lambert_w0(1.0) == doctest::Approx(0.5671432904097838).epsilon(1e-14));
  CHECK(lambert_w0(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("defining identity across magnitudes") {
  nomamec::Rng rng(2024);
  for (int i = 0; i < 2000; ++i) {
    double x = std::pow(10.0, rng.uniform(-9.0, 6.0));
    double w = lambert_w0(x);
    CHECK(std::fabs(w * std::exp(w) - x) <= 1e-12 * std::max(x, 1.0));
  }
}

TEST_CASE("monotone increasing") {
  double prev = lambert_w0(0.0);
  for (int i = 1; i <= 300; ++i) {
    double w = lambert_w0(i * 0.37);
    CHECK(w > prev);
    prev = w;
  }
}

TEST_CASE("log-argument form matches the direct form in range") {
  nomamec::Rng rng(77);
  for (int i = 0; i < 500; ++i) {
    double lx = rng.uniform(-20.0, 600.0);
    double direct = lambert_w0(std::exp(lx));
    double via_log = lambert_w0_exp(lx);
    CHECK(via_log == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("log-argument form survives overflow territory") {
  for (double lx : {701.0, 1000.0, 5000.0, 1e6}) {
    double w = lambert_w0_exp(lx);
    // w + ln w = lx is the log-domain identity.
    CHECK(std::fabs(w + std::log(w) - lx) <= 1e-10 * lx);
  }
  // Both sides of the internal switch point against reference values.
  CHECK(lambert_w0_exp(699.999999) ==
        doctest::Approx(693.45830788046547).epsilon(1e-12));
  CHECK(lambert_w0_exp(700.000001) ==
        doctest::Approx(693.45830987758553).epsilon(1e-12));
}

TEST_CASE("rejects bad arguments") {
  CHECK_THROWS_AS(lambert_w0(-1e-12), std::invalid_argument);
  CHECK_THROWS_AS(lambert_w0(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(lambert_w0(std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
}
