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

namespace nomamec {

// Principal branch of the Lambert W function, restricted to x >= 0
// (the only region the schedulers need). Halley iteration; the result
// satisfies |w*e^w - x| <= 1e-12 * max(x, 1).
// Throws std::invalid_argument for negative or non-finite input.
double lambert_w0(double x);

// W0(e^y) for arbitrary finite y, stable even where e^y overflows.
// Used by the task-split solver whose W argument is only available in
// log form when deadlines are nearly equal.
double lambert_w0_exp(double log_x);

}  // namespace nomamec
