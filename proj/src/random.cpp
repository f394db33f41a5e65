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

#include "qfdiv/random.hpp"

#include <cmath>

namespace qfdiv {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                          std::uint64_t index) {
  return splitmix64(splitmix64(root ^ fnv1a(stream)) + index);
}

Rng make_rng(std::uint64_t root, std::string_view stream, std::uint64_t index) {
  return Rng(derive_seed(root, stream, index));
}

double uniform(Rng &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng &rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

CMatrix gaussian_matrix(Rng &rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

CMatrix random_unitary(Rng &rng, int d) {
  const Eigen::HouseholderQR<CMatrix> qr(gaussian_matrix(rng, d, d));
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

HermMatrix random_psd(Rng &rng, int d) {
  const CMatrix g = gaussian_matrix(rng, d, d);
  return hermitian_part(g.adjoint() * g);
}

HermMatrix random_density(Rng &rng, int d, double floor) {
  const CMatrix g = gaussian_matrix(rng, d, d);
  CMatrix p = g.adjoint() * g;
  p += floor * p.trace().real() * CMatrix::Identity(d, d);
  return hermitian_part(p / p.trace().real());
}

HermMatrix random_hermitian(Rng &rng, int d) {
  return hermitian_part(gaussian_matrix(rng, d, d));
}

HermMatrix random_pure(Rng &rng, int d) {
  CVector psi = gaussian_matrix(rng, d, 1).col(0);
  psi.normalize();
  return hermitian_part(psi * psi.adjoint());
}

}  // namespace qfdiv
