// Copyright 2026 The qfdiv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <vector>

namespace qfdiv {

struct NelderMeadOptions {
  int max_evals = 2000;
  double initial_step = 0.25;
  double ftol = 1e-14;
  double xtol = 1e-12;
};

struct NelderMeadResult {
  std::vector<double> x;
  double fx = 0.0;
  int evals = 0;
  bool converged = false;  // stopped on tolerance rather than budget
};

/// Derivative-free simplex minimization with dimension-adaptive coefficients
/// (reflection 1, expansion 1 + 2/n, contraction 3/4 − 1/(2n), shrink 1 − 1/n).
NelderMeadResult nelder_mead_minimize(
    const std::function<double(const std::vector<double> &)> &fn,
    std::vector<double> x0, const NelderMeadOptions &options = {});

}  // namespace qfdiv
