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

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <utility>

namespace qfdiv {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Real function applied spectrally to Hermitian matrices.
using ScalarFn = std::function<double(double)>;

inline constexpr double kDefaultHermTol = 1e-10;
/// Eigenvalues at or below this fraction of λ_max count as "not invertible".
inline constexpr double kPdFloor = 1e-12;
/// Eigenvalues at or below this fraction of λ_max span the kernel.
inline constexpr double kKernelCut = 1e-10;
/// Tolerance (relative to 1 + ‖H‖_F) for clamping tiny negative eigenvalues.
inline constexpr double kPsdTol = 1e-10;

/// Dense complex Hermitian matrix.
///
/// Construction checks max |H_ij − conj(H_ji)| ≤ herm_tol · (1 + max |H_ij|)
/// and then stores the exactly Hermitian part (H + H†)/2.
class HermMatrix {
 public:
  explicit HermMatrix(const CMatrix &entries,
                      double herm_tol = kDefaultHermTol);

  static HermMatrix identity(int dim);
  static HermMatrix zero(int dim);
  static HermMatrix diagonal(const RVector &diag);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix &mat() const { return entries_; }
  double herm_tol() const { return herm_tol_; }
  double trace() const { return entries_.trace().real(); }
  double norm() const { return entries_.norm(); }

  HermMatrix operator+(const HermMatrix &other) const;
  HermMatrix operator-(const HermMatrix &other) const;
  HermMatrix operator*(double scale) const;

 private:
  struct Unchecked {};
  HermMatrix(Unchecked, CMatrix entries, double herm_tol)
      : entries_(std::move(entries)), herm_tol_(herm_tol) {}
  friend HermMatrix hermitian_part(const CMatrix &m);

  CMatrix entries_;
  double herm_tol_;
};

struct EigDecomp {
  RVector eigenvalues;  // ascending
  CMatrix eigenvectors; // columns, unitary

  double min() const { return eigenvalues(0); }
  double max() const { return eigenvalues(eigenvalues.size() - 1); }
  CMatrix reconstruct() const;
};

/// Cyclic complex Jacobi eigensolver. Columns of the eigenvector matrix are
/// phase-normalized so their first non-negligible component is real positive.
EigDecomp herm_eig(const HermMatrix &h);

/// U g(Λ) U† with no precondition on the spectrum.
HermMatrix spectral_map(const HermMatrix &h, const ScalarFn &g);
HermMatrix spectral_map(const EigDecomp &eig, const ScalarFn &g);

/// True when λ_min > kPdFloor · λ_max and λ_max > 0.
bool is_positive_definite(const EigDecomp &eig);

/// Functional calculus for positive definite inputs.
HermMatrix matrix_fn(const HermMatrix &h, const ScalarFn &f);

/// Minimum eigenvalue.
double psd_margin(const HermMatrix &h);

/// a ≼ b in the Loewner order, i.e. λ_min(b − a) ≥ −tol · (1 + ‖b − a‖_F).
bool loewner_leq(const HermMatrix &a, const HermMatrix &b, double tol);

HermMatrix sqrt_psd(const HermMatrix &h);
HermMatrix inv_pd(const HermMatrix &h);
HermMatrix inv_sqrt_pd(const HermMatrix &h);

/// Projector onto the eigenvectors with eigenvalue ≤ kKernelCut · λ_max.
HermMatrix kernel_projector(const HermMatrix &y);

struct Block2Decision {
  bool via_fact;
  bool via_eig;
};

/// Decides [[A, B], [B†, C]] ≥ 0 two ways: through the Schur-complement
/// criterion C ≥ B†A⁻¹B and through the spectrum of the assembled block matrix.
Block2Decision block2_psd(const HermMatrix &a, const CMatrix &b,
                          const HermMatrix &c, double tol);

CMatrix kron(const CMatrix &a, const CMatrix &b);

/// Hermitian part (M + M†)/2 wrapped without a tolerance check.
HermMatrix hermitian_part(const CMatrix &m);

}  // namespace qfdiv
