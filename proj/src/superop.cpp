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

#include "qfdiv/superop.hpp"

#include <sstream>

#include "qfdiv/error.hpp"

namespace qfdiv {

namespace {

CMatrix unit(int rows, int cols, int i, int j) {
  CMatrix e = CMatrix::Zero(rows, cols);
  e(i, j) = 1.0;
  return e;
}

}  // namespace

CMatrix SuperOp::apply(const CMatrix &a) const {
  if (a.rows() != dim_in || a.cols() != dim_in) {
    throw Error(ErrorKind::DimMismatch, "SuperOp::apply",
                "operand is not " + std::to_string(dim_in) + "x" +
                    std::to_string(dim_in));
  }
  return unvec(matrix * vec(a), dim_out, dim_out);
}

SuperOp SuperOp::adjoint() const {
  return SuperOp{dim_out, dim_in, matrix.adjoint(), self_adjoint};
}

SuperOp SuperOp::compose(const SuperOp &inner) const {
  if (inner.dim_out != dim_in) {
    throw Error(ErrorKind::DimMismatch, "SuperOp::compose",
                "inner output dimension does not match");
  }
  return SuperOp{inner.dim_in, dim_out, matrix * inner.matrix, false};
}

HermMatrix SuperOp::as_hermitian() const {
  return HermMatrix(matrix);
}

CVector gamma_vec(int d) {
  if (d < 1) throw Error(ErrorKind::BadParameter, "gamma_vec", "d < 1");
  CVector g = CVector::Zero(static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d; ++i) g(i * d + i) = 1.0;
  return g;
}

CVector vec(const CMatrix &a) {
  CVector v(a.size());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) v(i * a.cols() + j) = a(i, j);
  }
  return v;
}

CMatrix unvec(const CVector &v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols) {
    throw Error(ErrorKind::DimMismatch, "unvec", "length mismatch");
  }
  CMatrix a(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) a(i, j) = v(i * cols + j);
  }
  return a;
}

SuperOp lift(const CMatrix &m, const CMatrix &n) {
  if (m.cols() != n.rows() || m.rows() != n.cols()) {
    throw Error(ErrorKind::DimMismatch, "lift",
                "M is " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + ", N is " +
                    std::to_string(n.rows()) + "x" + std::to_string(n.cols()));
  }
  return SuperOp{static_cast<int>(m.cols()), static_cast<int>(m.rows()),
                 kron(m, n.transpose()), false};
}

SuperOp superop_from_action(
    int dim_in, int dim_out,
    const std::function<CMatrix(const CMatrix &)> &action) {
  SuperOp s{dim_in, dim_out,
            CMatrix(static_cast<Eigen::Index>(dim_out) * dim_out,
                    static_cast<Eigen::Index>(dim_in) * dim_in),
            false};
  for (int i = 0; i < dim_in; ++i) {
    for (int j = 0; j < dim_in; ++j) {
      const CMatrix out = action(unit(dim_in, dim_in, i, j));
      if (out.rows() != dim_out || out.cols() != dim_out) {
        throw Error(ErrorKind::DimMismatch, "superop_from_action",
                    "action returned the wrong shape");
      }
      s.matrix.col(i * dim_in + j) = vec(out);
    }
  }
  return s;
}

SuperOp rel_modular(const HermMatrix &rho, const HermMatrix &sigma) {
  if (rho.dim() != sigma.dim()) {
    throw Error(ErrorKind::DimMismatch, "rel_modular", "rho and sigma differ");
  }
  SuperOp s = lift(rho.mat(), inv_pd(sigma).mat());
  s.self_adjoint = true;
  return s;
}

SuperOp superop_fn(const SuperOp &s, const ScalarFn &f) {
  if (s.dim_in != s.dim_out) {
    throw Error(ErrorKind::DimMismatch, "superop_fn", "not an endomorphism");
  }
  const HermMatrix h = s.as_hermitian();
  SuperOp out{s.dim_in, s.dim_out, matrix_fn(h, f).mat(), true};
  return out;
}

SuperOp modular_fn(const HermMatrix &z, const HermMatrix &tau,
                   const ScalarFn &f) {
  if (z.dim() != tau.dim()) {
    throw Error(ErrorKind::DimMismatch, "modular_fn", "Z and tau differ");
  }
  const EigDecomp ez = herm_eig(z);
  const EigDecomp et = herm_eig(tau);
  if (!is_positive_definite(ez) || !is_positive_definite(et)) {
    throw Error(ErrorKind::NotPositiveDefinite, "modular_fn",
                "Z and tau must be positive definite");
  }
  const int d = z.dim();
  const CMatrix basis = kron(ez.eigenvectors, et.eigenvectors.conjugate());
  RVector values(d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      values(i * d + j) = f(ez.eigenvalues(i) / et.eigenvalues(j));
    }
  }
  const CMatrix m =
      basis * values.cast<Complex>().asDiagonal() * basis.adjoint();
  return SuperOp{d, d, 0.5 * (m + m.adjoint()), true};
}

MapSpec MapSpec::from_kraus(std::vector<CMatrix> ops) {
  if (ops.empty()) {
    throw Error(ErrorKind::BadParameter, "MapSpec::from_kraus",
                "empty Kraus list");
  }
  MapSpec m;
  m.kind = Kind::kraus;
  m.dim_out = static_cast<int>(ops.front().rows());
  m.dim_in = static_cast<int>(ops.front().cols());
  for (const CMatrix &k : ops) {
    if (k.rows() != m.dim_out || k.cols() != m.dim_in) {
      throw Error(ErrorKind::DimMismatch, "MapSpec::from_kraus",
                  "Kraus operators have inconsistent shapes");
    }
  }
  m.kraus = std::move(ops);
  m.trace_preserving = check_trace_preserving(m);
  return m;
}

MapSpec MapSpec::from_choi(const CMatrix &choi, int dim_in, int dim_out) {
  const Eigen::Index n = static_cast<Eigen::Index>(dim_in) * dim_out;
  if (dim_in < 1 || dim_out < 1 || choi.rows() != n || choi.cols() != n) {
    throw Error(ErrorKind::DimMismatch, "MapSpec::from_choi",
                "Choi matrix must be (dim_in*dim_out) square");
  }
  MapSpec m;
  m.kind = Kind::choi;
  m.dim_in = dim_in;
  m.dim_out = dim_out;
  m.choi = choi;
  m.trace_preserving = check_trace_preserving(m);
  return m;
}

MapSpec MapSpec::named(std::string name, MapSpec payload) {
  payload.kind = Kind::named;
  payload.name = std::move(name);
  return payload;
}

std::string MapSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kraus: os << "kraus[" << kraus.size() << "]"; break;
    case Kind::choi: os << "choi"; break;
    case Kind::named: os << name; break;
  }
  os << " " << dim_in << "->" << dim_out;
  return os.str();
}

CMatrix apply_map(const MapSpec &phi, const CMatrix &a) {
  if (a.rows() != phi.dim_in || a.cols() != phi.dim_in) {
    throw Error(ErrorKind::DimMismatch, "apply_map",
                "operand is " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + ", map expects " +
                    std::to_string(phi.dim_in));
  }
  CMatrix out = CMatrix::Zero(phi.dim_out, phi.dim_out);
  if (phi.has_kraus()) {
    for (const CMatrix &k : phi.kraus) out += k * a * k.adjoint();
    return out;
  }
  const int d = phi.dim_out;
  for (int i = 0; i < phi.dim_in; ++i) {
    for (int j = 0; j < phi.dim_in; ++j) {
      if (a(i, j) != Complex(0.0)) out += a(i, j) * phi.choi.block(i * d, j * d, d, d);
    }
  }
  return out;
}

HermMatrix apply_map(const MapSpec &phi, const HermMatrix &a) {
  return hermitian_part(apply_map(phi, a.mat()));
}

SuperOp kraus_to_superop(const MapSpec &phi) {
  if (phi.has_kraus()) {
    SuperOp s{phi.dim_in, phi.dim_out,
              CMatrix::Zero(static_cast<Eigen::Index>(phi.dim_out) * phi.dim_out,
                            static_cast<Eigen::Index>(phi.dim_in) * phi.dim_in),
              false};
    for (const CMatrix &k : phi.kraus) s.matrix += kron(k, k.conjugate());
    return s;
  }
  return superop_from_action(phi.dim_in, phi.dim_out,
                             [&](const CMatrix &a) { return apply_map(phi, a); });
}

CMatrix choi_matrix(const MapSpec &phi) {
  if (!phi.has_kraus()) return phi.choi;
  const int din = phi.dim_in;
  const int dout = phi.dim_out;
  CMatrix j(static_cast<Eigen::Index>(din) * dout,
            static_cast<Eigen::Index>(din) * dout);
  for (int a = 0; a < din; ++a) {
    for (int b = 0; b < din; ++b) {
      j.block(a * dout, b * dout, dout, dout) = apply_map(phi, unit(din, din, a, b));
    }
  }
  return j;
}

HermMatrix choi_of(const MapSpec &phi) { return HermMatrix(choi_matrix(phi)); }

MapSpec superop_to_map(const SuperOp &s) {
  const int din = s.dim_in;
  const int dout = s.dim_out;
  CMatrix j(static_cast<Eigen::Index>(din) * dout,
            static_cast<Eigen::Index>(din) * dout);
  for (int a = 0; a < din; ++a) {
    for (int b = 0; b < din; ++b) {
      j.block(a * dout, b * dout, dout, dout) = s.apply(unit(din, din, a, b));
    }
  }
  return MapSpec::from_choi(j, din, dout);
}

MapSpec adjoint_map(const MapSpec &phi) {
  MapSpec out;
  if (phi.has_kraus()) {
    std::vector<CMatrix> ops;
    ops.reserve(phi.kraus.size());
    for (const CMatrix &k : phi.kraus) ops.push_back(k.adjoint());
    out = MapSpec::from_kraus(std::move(ops));
  } else {
    out = superop_to_map(kraus_to_superop(phi).adjoint());
  }
  if (phi.kind == MapSpec::Kind::named) {
    out = MapSpec::named("adjoint(" + phi.name + ")", std::move(out));
  }
  return out;
}

MapSpec compose_maps(const MapSpec &first, const MapSpec &second) {
  if (first.dim_out != second.dim_in) {
    throw Error(ErrorKind::DimMismatch, "compose_maps",
                "output of the first map (" + std::to_string(first.dim_out) +
                    ") does not feed the second (" +
                    std::to_string(second.dim_in) + ")");
  }
  if (first.has_kraus() && second.has_kraus()) {
    std::vector<CMatrix> ops;
    for (const CMatrix &k2 : second.kraus) {
      for (const CMatrix &k1 : first.kraus) ops.push_back(k2 * k1);
    }
    return MapSpec::from_kraus(std::move(ops));
  }
  return superop_to_map(kraus_to_superop(second).compose(kraus_to_superop(first)));
}

bool check_trace_preserving(const MapSpec &phi, double tol) {
  const CMatrix id = CMatrix::Identity(phi.dim_in, phi.dim_in);
  if (phi.has_kraus()) {
    CMatrix sum = CMatrix::Zero(phi.dim_in, phi.dim_in);
    for (const CMatrix &k : phi.kraus) sum += k.adjoint() * k;
    return (sum - id).cwiseAbs().maxCoeff() <= tol;
  }
  // partial trace of the Choi matrix over the output factor
  const int d = phi.dim_out;
  CMatrix reduced(phi.dim_in, phi.dim_in);
  for (int a = 0; a < phi.dim_in; ++a) {
    for (int b = 0; b < phi.dim_in; ++b) {
      reduced(a, b) = phi.choi.block(a * d, b * d, d, d).trace();
    }
  }
  return (reduced - id).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace qfdiv
