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

#include <Eigen/Eigenvalues>
#include <cmath>

#include "qfdiv/hermitian.hpp"
#include "qfdiv/random.hpp"

namespace qfdiv::testing {

// Reference eigenvalues from Eigen's tridiagonal QR solver; independent of
// the Jacobi implementation under test.
inline RVector reference_eigenvalues(const CMatrix &h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  return solver.eigenvalues();
}

inline double rel_err(const CMatrix &a, const CMatrix &b) {
  return (a - b).norm() / (1.0 + b.norm());
}

inline HermMatrix random_pd(Rng &rng, int d) {
  const CMatrix g = gaussian_matrix(rng, d, d);
  return hermitian_part(g.adjoint() * g + 0.1 * CMatrix::Identity(d, d));
}

}  // namespace qfdiv::testing
