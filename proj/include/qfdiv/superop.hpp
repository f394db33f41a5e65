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
#include <string>
#include <vector>

#include "qfdiv/hermitian.hpp"

namespace qfdiv {

// Vectorization convention: vec(A) = (A ⊗ I)|Γ⟩ with |Γ⟩ = Σ_i |i⟩|i⟩, which
// is row-major stacking. Under it the map A ↦ M A N has matrix M ⊗ Nᵀ.

/// Linear map on matrices stored as a (dim_out² × dim_in²) matrix acting on
/// vectorized operators.
struct SuperOp {
  int dim_in = 0;
  int dim_out = 0;
  CMatrix matrix;
  bool self_adjoint = false;

  CMatrix apply(const CMatrix &a) const;
  SuperOp adjoint() const;
  SuperOp compose(const SuperOp &inner) const;  // this ∘ inner
  /// Matrix as a HermMatrix; throws NonHermitian unless self-adjoint.
  HermMatrix as_hermitian() const;
};

CVector gamma_vec(int d);
CVector vec(const CMatrix &a);
CMatrix unvec(const CVector &v, int rows, int cols);

/// A ↦ M A N, for M of shape d_out × d_in and N of shape d_in × d_out.
SuperOp lift(const CMatrix &m, const CMatrix &n);

/// Tabulates a linear action on the matrix units E_ij.
SuperOp superop_from_action(int dim_in, int dim_out,
                            const std::function<CMatrix(const CMatrix &)> &action);

/// Δ(ρ, σ): X ↦ ρ X σ⁻¹.
SuperOp rel_modular(const HermMatrix &rho, const HermMatrix &sigma);

/// Spectral calculus on a self-adjoint superoperator with positive spectrum.
SuperOp superop_fn(const SuperOp &s, const ScalarFn &f);

/// f(Δ(Z, τ)) assembled from the eigenpairs of Z and τ separately:
/// eigenvalues z_i / t_j with eigenoperators u_i v_j†.
SuperOp modular_fn(const HermMatrix &z, const HermMatrix &tau,
                   const ScalarFn &f);

/// Linear map between matrix algebras, B(C^dim_in) → B(C^dim_out).
struct MapSpec {
  enum class Kind { kraus, choi, named };

  Kind kind = Kind::kraus;
  int dim_in = 0;
  int dim_out = 0;
  // kraus kind: the operators. named kind: set when the zoo entry has a CP
  // Kraus form, otherwise `choi` carries the payload.
  std::vector<CMatrix> kraus;
  CMatrix choi;
  // zoo grammar string for named maps
  std::string name;
  bool trace_preserving = false;

  static MapSpec from_kraus(std::vector<CMatrix> ops);
  static MapSpec from_choi(const CMatrix &choi, int dim_in, int dim_out);
  static MapSpec named(std::string name, MapSpec payload);

  bool has_kraus() const { return !kraus.empty(); }
  std::string describe() const;
};

CMatrix apply_map(const MapSpec &phi, const CMatrix &a);
HermMatrix apply_map(const MapSpec &phi, const HermMatrix &a);

/// Hilbert–Schmidt adjoint. Kraus operators map to their adjoints.
MapSpec adjoint_map(const MapSpec &phi);

/// Applies `first`, then `second`.
MapSpec compose_maps(const MapSpec &first, const MapSpec &second);

SuperOp kraus_to_superop(const MapSpec &phi);
MapSpec superop_to_map(const SuperOp &s);

/// Σ_ij E_ij ⊗ Φ(E_ij) = (id ⊗ Φ)|Γ⟩⟨Γ|, without a Hermiticity check.
CMatrix choi_matrix(const MapSpec &phi);
HermMatrix choi_of(const MapSpec &phi);

bool check_trace_preserving(const MapSpec &phi, double tol = 1e-10);

}  // namespace qfdiv
