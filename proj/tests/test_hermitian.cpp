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

#include <doctest.h>

#include <cmath>

#include "qfdiv/error.hpp"
#include "qfdiv/hermitian.hpp"
#include "qfdiv/random.hpp"
#include "test_support.hpp"

using namespace qfdiv;
using qfdiv::testing::random_pd;
using qfdiv::testing::reference_eigenvalues;
using qfdiv::testing::rel_err;

namespace {

HermMatrix diag(std::initializer_list<double> values) {
  RVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return HermMatrix::diagonal(v);
}

HermMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return HermMatrix(m);
}

}  // namespace

TEST_CASE("HermMatrix rejects non-Hermitian and non-square input") {
  CMatrix m(2, 2);
  m << 1.0, 2.0, 0.0, 1.0;
  CHECK_THROWS_AS(HermMatrix{m}, Error);
  try {
    HermMatrix bad(m);
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::NonHermitian);
  }
  CHECK_THROWS_AS(HermMatrix(CMatrix::Zero(2, 3)), Error);

  // small asymmetry inside the tolerance is accepted and symmetrized away
  m << 1.0, Complex(0.5, 1e-12), Complex(0.5, 0.0), 2.0;
  const HermMatrix ok(m);
  CHECK((ok.mat() - ok.mat().adjoint()).norm() == 0.0);
}

TEST_CASE("herm_eig on small fixed matrices") {
  const EigDecomp d = herm_eig(diag({1.0, 2.0}));
  CHECK(d.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(d.eigenvalues(1) == doctest::Approx(2.0));
  CHECK(rel_err(d.eigenvectors, CMatrix::Identity(2, 2)) < 1e-15);

  const EigDecomp x = herm_eig(pauli_x());
  CHECK(x.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(x.eigenvalues(1) == doctest::Approx(1.0));
}

TEST_CASE("herm_eig reconstruction, unitarity and agreement with a QR solver") {
  Rng rng = make_rng(11, "herm_eig", 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 16;
    const HermMatrix h = random_hermitian(rng, d);
    const EigDecomp e = herm_eig(h);
    CHECK((e.reconstruct() - h.mat()).norm() <= 1e-9 * (1.0 + h.norm()));
    CHECK((e.eigenvectors.adjoint() * e.eigenvectors - CMatrix::Identity(d, d)).norm() <= 1e-9);
    const RVector ref = reference_eigenvalues(h.mat());
    CHECK((e.eigenvalues - ref).norm() <= 1e-10 * (1.0 + h.norm()));
    for (int k = 1; k < d; ++k) CHECK(e.eigenvalues(k - 1) <= e.eigenvalues(k));
    // phase convention: first non-negligible component is real positive
    for (int c = 0; c < d; ++c) {
      for (int r = 0; r < d; ++r) {
        if (std::abs(e.eigenvectors(r, c)) > 1e-8) {
          CHECK(e.eigenvectors(r, c).imag() == 0.0);
          CHECK(e.eigenvectors(r, c).real() > 0.0);
          break;
        }
      }
    }
  }
}

TEST_CASE("herm_eig handles degenerate and zero matrices") {
  const EigDecomp z = herm_eig(HermMatrix::zero(3));
  CHECK(z.eigenvalues.cwiseAbs().maxCoeff() == 0.0);
  const EigDecomp i = herm_eig(HermMatrix::identity(4));
  CHECK((i.eigenvalues.array() - 1.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("matrix_fn examples") {
  Rng rng = make_rng(12, "matrix_fn", 0);
  const HermMatrix h = random_pd(rng, 3);
  CHECK(rel_err(matrix_fn(h, [](double x) { return x; }).mat(), h.mat()) < 1e-12);

  const HermMatrix inv = matrix_fn(diag({2.0, 4.0}), [](double x) { return 1.0 / x; });
  CHECK(rel_err(inv.mat(), diag({0.5, 0.25}).mat()) < 1e-15);

  // −log then exp(−x) returns the input
  const HermMatrix neglog = matrix_fn(h, [](double x) { return -std::log(x); });
  const HermMatrix back = spectral_map(neglog, [](double x) { return std::exp(-x); });
  CHECK((back.mat() - h.mat()).norm() <= 1e-8);

  CHECK_THROWS_AS(matrix_fn(diag({1.0, 0.0}), [](double x) { return x; }), Error);
  CHECK_THROWS_AS(matrix_fn(diag({1.0, 1e-13}), [](double x) { return x; }), Error);
}

TEST_CASE("matrix_fn commutes with unitary conjugation") {
  Rng rng = make_rng(13, "covariance", 0);
  const ScalarFn fns[] = {[](double x) { return -std::log(x); },
                          [](double x) { return std::pow(x, -0.5); },
                          [](double x) { return 1.0 / x; },
                          [](double x) { return x * x; }};
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 3;
    const HermMatrix h = random_pd(rng, d);
    const CMatrix u = random_unitary(rng, d);
    const HermMatrix rotated = hermitian_part(u * h.mat() * u.adjoint());
    for (const ScalarFn &f : fns) {
      const CMatrix lhs = matrix_fn(rotated, f).mat();
      const CMatrix rhs = u * matrix_fn(h, f).mat() * u.adjoint();
      CHECK((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
    }
  }
}

TEST_CASE("psd_margin and loewner_leq") {
  CHECK(psd_margin(diag({0.0, 1.0})) == doctest::Approx(0.0));
  CHECK(psd_margin(diag({-1.0, 1.0})) == doctest::Approx(-1.0));
  Rng rng = make_rng(14, "psd", 0);
  for (int trial = 0; trial < 30; ++trial) {
    CHECK(psd_margin(random_psd(rng, 1 + trial % 5)) >= -1e-12);
  }

  const HermMatrix id = HermMatrix::identity(2);
  CHECK(loewner_leq(id, id * 2.0, 1e-9));
  CHECK_FALSE(loewner_leq(diag({1.0, 0.0}), diag({0.0, 1.0}), 1e-9));
  CHECK_FALSE(loewner_leq(diag({0.0, 1.0}), diag({1.0, 0.0}), 1e-9));
  const HermMatrix a = random_hermitian(rng, 3);
  CHECK(loewner_leq(a, a, 1e-9));
  CHECK_THROWS_AS(loewner_leq(id, HermMatrix::identity(3), 1e-9), Error);
}

TEST_CASE("sqrt_psd") {
  CHECK(rel_err(sqrt_psd(diag({4.0, 9.0})).mat(), diag({2.0, 3.0}).mat()) < 1e-15);
  CHECK(rel_err(sqrt_psd(HermMatrix::identity(3)).mat(), CMatrix::Identity(3, 3)) < 1e-15);
  Rng rng = make_rng(15, "sqrt", 0);
  for (int trial = 0; trial < 30; ++trial) {
    const HermMatrix g = random_psd(rng, 1 + trial % 5);
    const CMatrix r = sqrt_psd(g).mat();
    CHECK((r * r - g.mat()).norm() <= 1e-9 * g.norm());
  }
  // rank deficient input with rounding-level negative eigenvalues
  CMatrix v = gaussian_matrix(rng, 3, 1);
  const HermMatrix rank1 = hermitian_part(v * v.adjoint());
  const CMatrix r = sqrt_psd(rank1).mat();
  CHECK((r * r - rank1.mat()).norm() <= 1e-9 * rank1.norm());
  CHECK_THROWS_AS(sqrt_psd(diag({-1.0, 1.0})), Error);
}

TEST_CASE("inv_pd") {
  CHECK(rel_err(inv_pd(diag({2.0, 4.0})).mat(), diag({0.5, 0.25}).mat()) < 1e-15);
  CHECK(rel_err(inv_pd(HermMatrix::identity(2)).mat(), CMatrix::Identity(2, 2)) < 1e-15);
  Rng rng = make_rng(16, "inv", 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 1 + trial % 5;
    const HermMatrix h = random_pd(rng, d);
    CHECK((h.mat() * inv_pd(h).mat() - CMatrix::Identity(d, d)).norm() <= 1e-9);
  }
  try {
    inv_pd(diag({1.0, 0.0}));
    FAIL("expected NotPositiveDefinite");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::NotPositiveDefinite);
  }
}

TEST_CASE("kernel_projector") {
  CHECK(rel_err(kernel_projector(diag({1.0, 0.0})).mat(), diag({0.0, 1.0}).mat()) < 1e-15);
  CHECK(kernel_projector(HermMatrix::identity(3)).norm() == 0.0);

  Rng rng = make_rng(17, "kernel", 0);
  CVector v = gaussian_matrix(rng, 3, 1).col(0);
  v.normalize();
  const HermMatrix rank1 = hermitian_part(v * v.adjoint());
  const HermMatrix pi = kernel_projector(rank1);
  CHECK(pi.trace() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK((pi.mat() * pi.mat() - pi.mat()).norm() <= 1e-10);
  CHECK((pi.mat() * rank1.mat()).norm() <= 1e-10);

  // kernel projector and range projector sum to the identity
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 4;
    const int rank = 1 + trial % (d - 1);
    const CMatrix g = gaussian_matrix(rng, d, rank);
    const HermMatrix y = hermitian_part(g * g.adjoint());
    const EigDecomp e = herm_eig(y);
    const double cut = kKernelCut * e.max();
    const HermMatrix range = spectral_map(e, [cut](double x) { return x > cut ? 1.0 : 0.0; });
    const HermMatrix ker = kernel_projector(y);
    CHECK((ker.mat() + range.mat() - CMatrix::Identity(d, d)).norm() <= 1e-10);
    CHECK(ker.trace() == doctest::Approx(d - rank).epsilon(1e-10));
  }
}

TEST_CASE("block2_psd fixed examples") {
  const HermMatrix id = HermMatrix::identity(2);
  const Block2Decision yes = block2_psd(id, CMatrix::Identity(2, 2), id, 1e-9);
  CHECK(yes.via_fact);
  CHECK(yes.via_eig);
  const Block2Decision no = block2_psd(id, CMatrix::Identity(2, 2), id * 0.5, 1e-9);
  CHECK_FALSE(no.via_fact);
  CHECK_FALSE(no.via_eig);
  CHECK_THROWS_AS(block2_psd(diag({1.0, 0.0}), CMatrix::Identity(2, 2), id, 1e-9), Error);
}

TEST_CASE("block2_psd decision paths agree on random inputs") {
  Rng rng = make_rng(18, "block2", 0);
  int positives = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + trial % 2;
    const HermMatrix a = random_pd(rng, d);
    const CMatrix b = gaussian_matrix(rng, d, d);
    const HermMatrix schur = hermitian_part(b.adjoint() * inv_pd(a).mat() * b);
    // half the cases shift by a PSD matrix, half by an indefinite one
    const HermMatrix shift = trial % 2 == 0 ? random_psd(rng, d) : random_hermitian(rng, d);
    const Block2Decision r = block2_psd(a, b, schur + shift, 1e-9);
    CHECK(r.via_fact == r.via_eig);
    positives += r.via_eig ? 1 : 0;
  }
  CHECK(positives > 50);
  CHECK(positives < 200);
}
