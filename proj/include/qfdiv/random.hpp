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

#include <cstdint>
#include <random>
#include <string_view>

#include "qfdiv/hermitian.hpp"

namespace qfdiv {

using Rng = std::mt19937_64;

/// Seed for the named stream (name, index) under a root seed. Every random
/// draw in the library goes through this so results do not depend on the
/// order in which trials are scheduled.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                          std::uint64_t index);
Rng make_rng(std::uint64_t root, std::string_view stream, std::uint64_t index);

double uniform(Rng &rng, double lo = 0.0, double hi = 1.0);
int uniform_int(Rng &rng, int lo, int hi);  // inclusive

/// Entries i.i.d. standard complex Gaussian.
CMatrix gaussian_matrix(Rng &rng, int rows, int cols);
/// Haar unitary (QR of a Gaussian matrix with the R-diagonal phases removed).
CMatrix random_unitary(Rng &rng, int d);
/// G†G + floor·I, normalized to unit trace.
HermMatrix random_density(Rng &rng, int d, double floor = kPdFloor);
/// G†G with G Gaussian, unnormalized.
HermMatrix random_psd(Rng &rng, int d);
HermMatrix random_hermitian(Rng &rng, int d);
/// |ψ⟩⟨ψ| for a Gaussian unit vector.
HermMatrix random_pure(Rng &rng, int d);

}  // namespace qfdiv
