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
#include <cstdint>
#include <initializer_list>
#include <random>

namespace nomamec {

// SplitMix64 finalizer, used to turn (seed, stream path) tuples into
// engine seeds so that every consumer gets an independent stream.
std::uint64_t mix64(std::uint64_t z);
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

// Deterministic random stream. Distributions are implemented by hand
// (not via <random> distribution objects, whose output is
// implementation-defined) so results are bit-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform in [0, 1), 53-bit resolution.
  double uniform01();
  double uniform(double lo, double hi);
  // Standard normal via Box-Muller; second draw is cached.
  double normal();
  // CN(0,1): complex Gaussian with unit mean square magnitude.
  std::complex<double> complex_normal();
  // Uniform integer in [0, n), rejection sampled (no modulo bias).
  std::uint64_t below(std::uint64_t n);

  // Independent substream; a function of the construction seed and the
  // stream id only, not of how much this stream has been consumed.
  Rng fork(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace nomamec
