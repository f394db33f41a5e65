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

#include "qfdiv/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <string>
#include <vector>

#include "qfdiv/error.hpp"

namespace qfdiv {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kMachEps = std::numeric_limits<double>::epsilon();
// entries below this fraction of ‖H‖_F are treated as zero
constexpr double kNegligible = 1e-30;

// Relative threshold: a pivot is left alone once it is small against the
// geometric mean of its diagonal pair. Small eigenvalues of positive definite
// inputs then keep relative accuracy, which an absolute threshold loses.
bool needs_rotation(const CMatrix &a, Eigen::Index p, Eigen::Index q, double total) {
  const double b = std::abs(a(p, q));
  if (b <= kNegligible * total) return false;
  return b > kMachEps * std::sqrt(std::abs(a(p, p).real()) * std::abs(a(q, q).real()));
}

// Zeroes a(p, q) with the unitary J = D R, where D = diag(1, e^{-iφ}) makes
// the pivot real and R is the real symmetric Jacobi rotation.
void rotate(CMatrix &a, CMatrix &v, Eigen::Index p, Eigen::Index q) {
  const Complex b = a(p, q);
  const double abs_b = std::abs(b);
  if (abs_b == 0.0) return;
  const Complex phase = b / abs_b;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = (aqq - app) / (2.0 * abs_b);
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) t = -t;
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const Complex jpp = c;
  const Complex jpq = s;
  const Complex jqp = -s * std::conj(phase);
  const Complex jqq = c * std::conj(phase);

  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * jpp + akq * jqp;
    a(k, q) = akp * jpq + akq * jqq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = app - t * abs_b;
  a(q, q) = aqq + t * abs_b;

  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = vkp * jpp + vkq * jqp;
    v(k, q) = vkp * jpq + vkq * jqq;
  }
}

void normalize_phase(CMatrix &vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    const double scale = vectors.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double mag = std::abs(vectors(i, j));
      if (mag > 1e-8 * scale) {
        vectors.col(j) *= std::conj(vectors(i, j)) / mag;
        vectors(i, j) = mag;
        break;
      }
    }
  }
}

}  // namespace

HermMatrix::HermMatrix(const CMatrix &entries, double herm_tol)
    : herm_tol_(herm_tol) {
  if (entries.rows() < 1 || entries.rows() != entries.cols()) {
    throw Error(ErrorKind::DimMismatch, "HermMatrix",
                "expected a non-empty square matrix, got " +
                    std::to_string(entries.rows()) + "x" +
                    std::to_string(entries.cols()));
  }
  if (!entries.allFinite()) {
    throw Error(ErrorKind::NonHermitian, "HermMatrix", "non-finite entry");
  }
  const double largest = entries.cwiseAbs().maxCoeff();
  const double asym = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  if (asym > herm_tol * (1.0 + largest)) {
    throw Error(ErrorKind::NonHermitian, "HermMatrix",
                "max |H - H^dagger| = " + std::to_string(asym));
  }
  entries_ = 0.5 * (entries + entries.adjoint());
}

HermMatrix HermMatrix::identity(int dim) {
  return HermMatrix(CMatrix::Identity(dim, dim));
}

HermMatrix HermMatrix::zero(int dim) {
  return HermMatrix(CMatrix::Zero(dim, dim));
}

HermMatrix HermMatrix::diagonal(const RVector &diag) {
  return HermMatrix(diag.cast<Complex>().asDiagonal().toDenseMatrix());
}

HermMatrix HermMatrix::operator+(const HermMatrix &other) const {
  if (dim() != other.dim()) {
    throw Error(ErrorKind::DimMismatch, "HermMatrix::operator+",
                "dimensions differ");
  }
  return hermitian_part(entries_ + other.entries_);
}

HermMatrix HermMatrix::operator-(const HermMatrix &other) const {
  if (dim() != other.dim()) {
    throw Error(ErrorKind::DimMismatch, "HermMatrix::operator-",
                "dimensions differ");
  }
  return hermitian_part(entries_ - other.entries_);
}

HermMatrix HermMatrix::operator*(double scale) const {
  return HermMatrix(Unchecked{}, entries_ * scale, herm_tol_);
}

HermMatrix hermitian_part(const CMatrix &m) {
  return HermMatrix(HermMatrix::Unchecked{}, 0.5 * (m + m.adjoint()),
                    kDefaultHermTol);
}

CMatrix EigDecomp::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() *
         eigenvectors.adjoint();
}

EigDecomp herm_eig(const HermMatrix &h) {
  const Eigen::Index n = h.dim();
  CMatrix a = h.mat();
  CMatrix v = CMatrix::Identity(n, n);
  const double total = a.norm();

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (!needs_rotation(a, p, q, total)) continue;
        rotate(a, v, p, q);
        converged = false;
      }
    }
  }
  if (!converged) {
    throw Error(ErrorKind::NoConvergence, "herm_eig",
                "pivots still above threshold after " +
                    std::to_string(kMaxSweeps) + " sweeps");
  }

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) {
                     return a(x, x).real() < a(y, y).real();
                   });
  EigDecomp out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = a(order[k], order[k]).real();
    out.eigenvectors.col(k) = v.col(order[k]);
  }
  normalize_phase(out.eigenvectors);
  return out;
}

HermMatrix spectral_map(const EigDecomp &eig, const ScalarFn &g) {
  const Eigen::Index n = eig.eigenvalues.size();
  RVector mapped(n);
  for (Eigen::Index k = 0; k < n; ++k) mapped(k) = g(eig.eigenvalues(k));
  return hermitian_part(eig.eigenvectors *
                        mapped.cast<Complex>().asDiagonal() *
                        eig.eigenvectors.adjoint());
}

HermMatrix spectral_map(const HermMatrix &h, const ScalarFn &g) {
  return spectral_map(herm_eig(h), g);
}

bool is_positive_definite(const EigDecomp &eig) {
  return eig.max() > 0.0 && eig.min() > kPdFloor * eig.max();
}

namespace {

EigDecomp require_pd(const HermMatrix &h, const char *op) {
  EigDecomp eig = herm_eig(h);
  if (!is_positive_definite(eig)) {
    throw Error(ErrorKind::NotPositiveDefinite, op,
                "min eigenvalue " + std::to_string(eig.min()) +
                    " not above floor " +
                    std::to_string(kPdFloor * std::max(eig.max(), 0.0)));
  }
  return eig;
}

}  // namespace

HermMatrix matrix_fn(const HermMatrix &h, const ScalarFn &f) {
  return spectral_map(require_pd(h, "matrix_fn"), f);
}

double psd_margin(const HermMatrix &h) { return herm_eig(h).min(); }

bool loewner_leq(const HermMatrix &a, const HermMatrix &b, double tol) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::DimMismatch, "loewner_leq",
                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  const HermMatrix diff = b - a;
  return psd_margin(diff) >= -tol * (1.0 + diff.norm());
}

HermMatrix sqrt_psd(const HermMatrix &h) {
  const EigDecomp eig = herm_eig(h);
  if (eig.min() < -kPsdTol * (1.0 + h.norm())) {
    throw Error(ErrorKind::NotPSD, "sqrt_psd",
                "min eigenvalue " + std::to_string(eig.min()));
  }
  return spectral_map(eig, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

HermMatrix inv_pd(const HermMatrix &h) {
  return spectral_map(require_pd(h, "inv_pd"), [](double x) { return 1.0 / x; });
}

HermMatrix inv_sqrt_pd(const HermMatrix &h) {
  return spectral_map(require_pd(h, "inv_sqrt_pd"),
                      [](double x) { return 1.0 / std::sqrt(x); });
}

HermMatrix kernel_projector(const HermMatrix &y) {
  const EigDecomp eig = herm_eig(y);
  const double cut = kKernelCut * std::max(eig.max(), 0.0);
  return spectral_map(eig, [cut](double x) { return x <= cut ? 1.0 : 0.0; });
}

CMatrix kron(const CMatrix &a, const CMatrix &b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Block2Decision block2_psd(const HermMatrix &a, const CMatrix &b,
                          const HermMatrix &c, double tol) {
  if (b.rows() != a.dim() || b.cols() != c.dim()) {
    throw Error(ErrorKind::DimMismatch, "block2_psd",
                "B must be dim(A) x dim(C)");
  }
  const HermMatrix a_inv = inv_pd(a);
  const HermMatrix schur = hermitian_part(b.adjoint() * a_inv.mat() * b);

  const Eigen::Index m = a.dim();
  const Eigen::Index n = c.dim();
  CMatrix block(m + n, m + n);
  block.topLeftCorner(m, m) = a.mat();
  block.topRightCorner(m, n) = b;
  block.bottomLeftCorner(n, m) = b.adjoint();
  block.bottomRightCorner(n, n) = c.mat();
  const HermMatrix assembled = hermitian_part(block);

  Block2Decision out;
  out.via_fact = loewner_leq(schur, c, tol);
  out.via_eig = psd_margin(assembled) >= -tol * (1.0 + assembled.norm());
  return out;
}

}  // namespace qfdiv
