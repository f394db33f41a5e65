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

// Extended-precision helpers for margins that are small differences of
// large terms. Inputs are taken as exact doubles.

#include <Eigen/Dense>
#include <complex>

#include "qfdiv/superop.hpp"

namespace qfdiv::detail {

using LComplex = std::complex<long double>;
using LMatrix = Eigen::Matrix<LComplex, Eigen::Dynamic, Eigen::Dynamic>;

inline LMatrix extend(const CMatrix &m) { return m.cast<LComplex>(); }
inline CMatrix to_double(const LMatrix &m) { return m.cast<Complex>(); }

/// Applies the map through its Kraus operators when it has them, so it acts
/// exactly as stored; otherwise Φ(A) = Σ_ij A_ij Φ(E_ij) from the Choi blocks.
inline LMatrix apply_extended(const MapSpec &phi, const LMatrix &a) {
  const int dout = phi.dim_out;
  LMatrix out = LMatrix::Zero(dout, dout);
  if (phi.has_kraus()) {
    for (const CMatrix &k : phi.kraus) {
      const LMatrix kl = extend(k);
      out += kl * a * kl.adjoint();
    }
    return out;
  }
  const CMatrix choi = choi_matrix(phi);
  for (int i = 0; i < phi.dim_in; ++i) {
    for (int j = 0; j < phi.dim_in; ++j) {
      out += a(i, j) * extend(choi.block(i * dout, j * dout, dout, dout));
    }
  }
  return out;
}

/// A⁻¹B by LU.
inline LMatrix solve(const LMatrix &a, const LMatrix &b) { return a.partialPivLu().solve(b); }

inline LMatrix kron(const LMatrix &a, const LMatrix &b) {
  LMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace qfdiv::detail
