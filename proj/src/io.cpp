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

#include "qfdiv/io.hpp"

#include <fstream>
#include <sstream>

#include "qfdiv/error.hpp"
#include "qfdiv/zoo.hpp"

namespace qfdiv {

namespace {

[[noreturn]] void parse_fail(const std::string &path, const std::string &what) {
  throw Error(ErrorKind::ParseError, path, what);
}

std::string index_path(const std::string &path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

std::string key_path(const std::string &path, const std::string &key) {
  return path + "." + key;
}

int read_dim(const json &j, const std::string &path) {
  if (!j.is_number_integer() || j.get<long long>() < 1 || j.get<long long>() > 64) {
    parse_fail(path, "expected an integer dimension in [1, 64]");
  }
  return j.get<int>();
}

HermMatrix checked_psd(const json &j, const std::string &path) {
  const HermMatrix h = herm_from_json(j, path);
  if (psd_margin(h) < -kPsdTol * (1.0 + h.norm())) {
    parse_fail(path, "matrix is not positive semidefinite");
  }
  return h;
}

}  // namespace

json matrix_to_json(const CMatrix &m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json &j, const std::string &path) {
  if (!j.is_array() || j.empty()) parse_fail(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    const json &row = j[i];
    const std::string rp = index_path(path, i);
    if (!row.is_array() || row.empty()) parse_fail(rp, "expected a non-empty row array");
    if (i == 0) cols = row.size();
    if (row.size() != cols) {
      parse_fail(rp, "row has " + std::to_string(row.size()) + " entries, expected " +
                         std::to_string(cols));
    }
  }
  CMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < cols; ++k) {
      const json &e = j[i][k];
      const std::string ep = index_path(index_path(path, i), k);
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        parse_fail(ep, "expected [re, im] pair of numbers");
      }
      m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

HermMatrix herm_from_json(const json &j, const std::string &path) {
  const CMatrix m = matrix_from_json(j, path);
  if (m.rows() != m.cols()) parse_fail(path, "expected a square matrix");
  try {
    return HermMatrix(m);
  } catch (const Error &e) {
    parse_fail(path, "matrix is not Hermitian");
  }
}

json map_to_json(const MapSpec &phi) {
  if (phi.kind == MapSpec::Kind::named) {
    try {
      parse_zoo(phi.name);
      if (phi.name.rfind("adjoint(", 0) != 0) return phi.name;
    } catch (const Error &) {
    }
  }
  if (phi.has_kraus()) {
    json ops = json::array();
    for (const CMatrix &k : phi.kraus) ops.push_back(matrix_to_json(k));
    return json{{"kraus", ops}};
  }
  return json{{"choi", matrix_to_json(phi.choi)},
              {"dim_in", phi.dim_in},
              {"dim_out", phi.dim_out}};
}

MapSpec map_from_json(const json &j, int dim_hint, const std::string &path) {
  if (j.is_string()) {
    try {
      return build_map(j.get<std::string>(), dim_hint);
    } catch (const Error &e) {
      if (e.kind() == ErrorKind::BadParameter || e.kind() == ErrorKind::ParseError ||
          e.kind() == ErrorKind::DimMismatch) {
        parse_fail(path, e.what());
      }
      throw;
    }
  }
  if (!j.is_object()) parse_fail(path, "expected a zoo string or a kraus/choi object");
  if (j.contains("kraus")) {
    const json &list = j["kraus"];
    const std::string lp = key_path(path, "kraus");
    if (!list.is_array() || list.empty()) parse_fail(lp, "expected a non-empty array");
    std::vector<CMatrix> ops;
    for (std::size_t i = 0; i < list.size(); ++i) {
      ops.push_back(matrix_from_json(list[i], index_path(lp, i)));
    }
    try {
      return MapSpec::from_kraus(std::move(ops));
    } catch (const Error &e) {
      parse_fail(lp, e.what());
    }
  }
  if (j.contains("choi")) {
    if (!j.contains("dim_in") || !j.contains("dim_out")) {
      parse_fail(path, "choi payload needs dim_in and dim_out");
    }
    const int din = read_dim(j["dim_in"], key_path(path, "dim_in"));
    const int dout = read_dim(j["dim_out"], key_path(path, "dim_out"));
    const CMatrix c = matrix_from_json(j["choi"], key_path(path, "choi"));
    try {
      return MapSpec::from_choi(c, din, dout);
    } catch (const Error &e) {
      parse_fail(key_path(path, "choi"), e.what());
    }
  }
  parse_fail(path, "expected a 'kraus' or 'choi' member");
}

InstanceFile instance_from_json(const json &j) {
  if (!j.is_object()) parse_fail("$", "expected an object");
  InstanceFile inst;
  if (!j.contains("version")) parse_fail("$.version", "missing");
  if (!j["version"].is_number_integer() || j["version"].get<int>() != kFormatVersion) {
    parse_fail("$.version", "unsupported version (expected 1)");
  }
  for (const char *key : {"X", "Y"}) {
    if (!j.contains(key)) parse_fail(std::string("$.") + key, "missing");
  }
  inst.x = checked_psd(j["X"], "$.X");
  inst.y = checked_psd(j["Y"], "$.Y");
  if (inst.x.dim() != inst.y.dim()) parse_fail("$.Y", "dimension differs from X");
  inst.dim_a = inst.x.dim();
  inst.dim_b = inst.dim_a;

  if (j.contains("dims")) {
    const json &dims = j["dims"];
    if (!dims.is_object()) parse_fail("$.dims", "expected {\"A\": dA, \"B\": dB}");
    if (dims.contains("A") && read_dim(dims["A"], "$.dims.A") != inst.dim_a) {
      parse_fail("$.dims.A", "does not match the dimension of X");
    }
    if (dims.contains("B")) inst.dim_b = read_dim(dims["B"], "$.dims.B");
  }
  if (j.contains("channel")) {
    const MapSpec phi = map_from_json(j["channel"], inst.dim_a, "$.channel");
    if (phi.dim_in != inst.dim_a) parse_fail("$.channel", "input dimension differs from X");
    if (j.contains("dims") && j["dims"].contains("B") && phi.dim_out != inst.dim_b) {
      parse_fail("$.channel", "output dimension differs from dims.B");
    }
    inst.dim_b = phi.dim_out;
    inst.channel = j["channel"];
  }
  if (j.contains("tau")) {
    const HermMatrix tau = checked_psd(j["tau"], "$.tau");
    if (tau.dim() != inst.dim_a) parse_fail("$.tau", "dimension differs from X");
    inst.tau = tau;
  }
  if (j.contains("omega")) {
    const HermMatrix omega = checked_psd(j["omega"], "$.omega");
    if (omega.dim() != inst.dim_b) parse_fail("$.omega", "dimension differs from dims.B");
    if (!is_positive_definite(herm_eig(omega))) parse_fail("$.omega", "must be positive definite");
    if (omega.trace() > 1.0 + 1e-12) parse_fail("$.omega", "trace exceeds 1");
    inst.omega = omega;
  }
  if (j.contains("f")) {
    if (!j["f"].is_string()) parse_fail("$.f", "expected a function name");
    try {
      find_fn(j["f"].get<std::string>());
    } catch (const Error &e) {
      parse_fail("$.f", e.what());
    }
    inst.f = j["f"].get<std::string>();
  }
  return inst;
}

json instance_to_json(const InstanceFile &inst) {
  json j;
  j["version"] = inst.version;
  j["dims"] = json{{"A", inst.dim_a}, {"B", inst.dim_b}};
  j["X"] = matrix_to_json(inst.x.mat());
  j["Y"] = matrix_to_json(inst.y.mat());
  if (inst.tau) j["tau"] = matrix_to_json(inst.tau->mat());
  if (inst.omega) j["omega"] = matrix_to_json(inst.omega->mat());
  if (inst.channel) j["channel"] = *inst.channel;
  if (inst.f) j["f"] = *inst.f;
  return j;
}

json read_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) parse_fail("$", "cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error &e) {
    parse_fail("$", "syntax error at byte " + std::to_string(e.byte) + " of '" + path + "'");
  }
}

}  // namespace qfdiv
