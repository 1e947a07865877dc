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

#include "nomamec/lambertw.hpp"

#include <cmath>
#include <stdexcept>

namespace nomamec {
namespace {

constexpr int kMaxIter = 64;

double halley(double w, double x) {
  // Solves w*e^w = x. The residual's own rounding noise scales as
  // w*x*eps, so the stop is residual-based with a step-size fallback
  // once updates shrink to ulp scale; both sit under the documented
  // 1e-12 * max(x, 1) bound.
  const double tol = 1e-13 * std::fmax(x, 1.0);
  for (int i = 0; i < kMaxIter; ++i) {
    double ew = std::exp(w);
    double f = w * ew - x;
    if (std::fabs(f) <= tol) return w;
    // f/f' and f''/f' as ratios; the raw products overflow near the
    // top of the double range.
    double r = (w - x * std::exp(-w)) / (w + 1.0);
    double dw = r / (1.0 - 0.5 * r * (w + 2.0) / (w + 1.0));
    w -= dw;
    if (std::fabs(dw) <= 4e-16 * (1.0 + std::fabs(w))) return w;
  }
  throw std::runtime_error("lambert_w0: Halley iteration failed to converge");
}

}  // namespace

double lambert_w0(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("lambert_w0: non-finite input");
  if (x < 0.0) throw std::invalid_argument("lambert_w0: negative input");
  if (x == 0.0) return 0.0;
  double w0;
  if (x >= M_E) {
    double l1 = std::log(x);
    double l2 = std::log(l1);
    w0 = l1 - l2 + l2 / l1;
  } else {
    w0 = x / (1.0 + x);
  }
  return halley(w0, x);
}

double lambert_w0_exp(double log_x) {
  if (!std::isfinite(log_x)) throw std::invalid_argument("lambert_w0_exp: non-finite input");
  if (log_x <= 700.0) return lambert_w0(std::exp(log_x));
  // Beyond double range: solve w + ln w = log_x by Newton. For log_x > 700
  // the root is huge, so the iteration is smooth and fast.
  double w = log_x - std::log(log_x);
  for (int i = 0; i < kMaxIter; ++i) {
    double g = w + std::log(w) - log_x;
    if (std::fabs(g) <= 1e-14 * log_x) return w;
    w -= g / (1.0 + 1.0 / w);
  }
  throw std::runtime_error("lambert_w0_exp: Newton iteration failed to converge");
}

}  // namespace nomamec
