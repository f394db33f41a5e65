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

#include "qfdiv/zoo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>

#include "extended.hpp"
#include "qfdiv/error.hpp"
#include "qfdiv/io.hpp"
#include "qfdiv/random.hpp"

namespace qfdiv {

namespace {

[[noreturn]] void bad(const std::string &what) {
  throw Error(ErrorKind::BadParameter, "zoo", what);
}

double read_real(const std::string &s, const std::string &what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    bad("cannot read " + what + " from '" + s + "'");
  }
  return v;
}

long long read_int(const std::string &s, const std::string &what) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    bad("cannot read " + what + " from '" + s + "'");
  }
  return v;
}

double probability(const std::string &s, const std::string &what) {
  const double p = read_real(s, what);
  if (p < 0.0 || p > 1.0) bad(what + " must lie in [0, 1], got " + s);
  return p;
}

std::pair<int, int> read_dims(const std::string &s) {
  const auto x = s.find('x');
  if (x == std::string::npos) {
    const int d = static_cast<int>(read_int(s, "dimension"));
    return {d, d};
  }
  return {static_cast<int>(read_int(s.substr(0, x), "dimension")),
          static_cast<int>(read_int(s.substr(x + 1), "dimension"))};
}

void require_params(const ZooEntry &e, std::size_t n) {
  if (e.params.size() != n) {
    bad("'" + e.name + "' takes " + std::to_string(n) + " parameter(s), got " +
        std::to_string(e.params.size()));
  }
}

// Splits "a,b,[c,d]" at top-level commas.
std::vector<std::string> split_list(std::string_view body) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string current;
  for (char c : body) {
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) parts.push_back(current);
  return parts;
}

CMatrix unit_vector_row(int d, int k) {
  CMatrix r = CMatrix::Zero(1, d);
  r(0, k) = 1.0;
  return r;
}

}  // namespace

ZooEntry parse_zoo(std::string_view grammar) {
  ZooEntry e;
  e.text = std::string(grammar);
  if (grammar.empty()) bad("empty channel description");
  const auto colon = grammar.find(':');
  e.name = std::string(grammar.substr(0, colon));
  if (colon == std::string_view::npos) return e;
  std::string_view rest = grammar.substr(colon + 1);
  if (e.name == "compose") {
    if (rest.size() < 2 || rest.front() != '[' || rest.back() != ']') {
      bad("compose expects compose:[a,b,...]");
    }
    e.params = split_list(rest.substr(1, rest.size() - 2));
    if (e.params.empty()) bad("compose needs at least one map");
    return e;
  }
  if (e.name == "unitary") {
    e.params.emplace_back(rest);
    return e;
  }
  std::size_t start = 0;
  while (true) {
    const auto next = rest.find(':', start);
    e.params.emplace_back(rest.substr(start, next - start));
    if (next == std::string_view::npos) break;
    start = next + 1;
  }
  return e;
}

MapSpec random_cptp(int dim_in, int dim_out, int env_dim, std::uint64_t seed) {
  if (dim_in < 1 || dim_out < 1 || env_dim < 1) bad("random_cptp dimensions must be >= 1");
  if (static_cast<long long>(dim_out) * env_dim < dim_in) {
    bad("random_cptp needs dim_out * k >= dim_in for an isometry");
  }
  Rng rng = make_rng(seed, "random_cptp", 0);
  const CMatrix g = gaussian_matrix(rng, dim_out * env_dim, dim_in);
  const Eigen::HouseholderQR<CMatrix> qr(g);
  const CMatrix iso = qr.householderQ() * CMatrix::Identity(dim_out * env_dim, dim_in);
  std::vector<CMatrix> ops;
  for (int k = 0; k < env_dim; ++k) ops.push_back(iso.block(k * dim_out, 0, dim_out, dim_in));
  return MapSpec::from_kraus(std::move(ops));
}

MapSpec transpose_map(int d) {
  CMatrix swap = CMatrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) swap(i * d + j, j * d + i) = 1.0;
  }
  return MapSpec::from_choi(swap, d, d);
}

MapSpec build(const ZooEntry &e, int dim) {
  const int d = dim > 0 ? dim : 2;
  MapSpec m;
  if (e.name == "identity") {
    require_params(e, 0);
    m = MapSpec::from_kraus({CMatrix::Identity(d, d)});
  } else if (e.name == "transpose") {
    require_params(e, 0);
    m = transpose_map(d);
  } else if (e.name == "depolarizing") {
    require_params(e, 1);
    const double p = probability(e.params[0], "depolarizing p");
    std::vector<CMatrix> ops{std::sqrt(1.0 - p) * CMatrix::Identity(d, d)};
    if (p > 0.0) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          CMatrix k = CMatrix::Zero(d, d);
          k(i, j) = std::sqrt(p / d);
          ops.push_back(k);
        }
      }
    }
    m = MapSpec::from_kraus(std::move(ops));
  } else if (e.name == "dephasing") {
    require_params(e, 1);
    const double p = probability(e.params[0], "dephasing p");
    std::vector<CMatrix> ops{std::sqrt(1.0 - p) * CMatrix::Identity(d, d)};
    if (p > 0.0) {
      for (int i = 0; i < d; ++i) {
        CMatrix k = CMatrix::Zero(d, d);
        k(i, i) = std::sqrt(p);
        ops.push_back(k);
      }
    }
    m = MapSpec::from_kraus(std::move(ops));
  } else if (e.name == "amplitude_damping") {
    require_params(e, 1);
    if (dim > 0 && dim != 2) bad("amplitude_damping is a qubit channel");
    const double g = probability(e.params[0], "amplitude_damping gamma");
    CMatrix k0 = CMatrix::Zero(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(1.0 - g);
    CMatrix k1 = CMatrix::Zero(2, 2);
    k1(0, 1) = std::sqrt(g);
    m = MapSpec::from_kraus({k0, k1});
  } else if (e.name == "unitary") {
    require_params(e, 1);
    const CMatrix u = matrix_from_json(read_json_file(e.params[0]));
    if (u.rows() != u.cols()) bad("unitary must be square");
    if ((u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() > 1e-10) {
      bad("matrix in '" + e.params[0] + "' is not unitary");
    }
    m = MapSpec::from_kraus({u});
  } else if (e.name == "partial_trace") {
    require_params(e, 2);
    const auto [da, db] = read_dims(e.params[0]);
    if (da < 1 || db < 1) bad("partial_trace dimensions must be >= 1");
    const std::string &factor = e.params[1];
    std::vector<CMatrix> ops;
    if (factor == "B") {
      for (int k = 0; k < db; ++k) {
        ops.push_back(kron(CMatrix::Identity(da, da), unit_vector_row(db, k)));
      }
    } else if (factor == "A") {
      for (int k = 0; k < da; ++k) {
        ops.push_back(kron(unit_vector_row(da, k), CMatrix::Identity(db, db)));
      }
    } else {
      bad("partial_trace factor must be A or B");
    }
    m = MapSpec::from_kraus(std::move(ops));
  } else if (e.name == "random_cptp") {
    require_params(e, 3);
    const auto [din, dout] = read_dims(e.params[0]);
    const long long k = read_int(e.params[1], "environment dimension");
    const long long seed = read_int(e.params[2], "seed");
    if (k < 1 || k > 64) bad("environment dimension must lie in [1, 64]");
    m = random_cptp(din, dout, static_cast<int>(k), static_cast<std::uint64_t>(seed));
  } else if (e.name == "compose") {
    int current = dim;
    std::optional<MapSpec> acc;
    for (const std::string &part : e.params) {
      MapSpec next = build(parse_zoo(part), current);
      acc = acc ? compose_maps(*acc, next) : next;
      current = acc->dim_out;
    }
    m = *acc;
  } else {
    bad("unknown zoo entry '" + e.name + "'");
  }
  return MapSpec::named(e.text, std::move(m));
}

MapSpec build_map(std::string_view grammar, int dim) {
  return build(parse_zoo(grammar), dim);
}

std::vector<ZooInfo> zoo_list() {
  return {
      {"identity", "identity", "none; dimension from context", true},
      {"transpose", "transpose", "none; dimension from context", false},
      {"depolarizing", "depolarizing:<p>", "p in [0,1]; dimension from context", true},
      {"dephasing", "dephasing:<p>", "p in [0,1]; dimension from context", true},
      {"amplitude_damping", "amplitude_damping:<g>", "g in [0,1]; qubit only", true},
      {"unitary", "unitary:<file>", "file holds a unitary as nested [re,im] pairs", true},
      {"partial_trace", "partial_trace:<dA>x<dB>:<A|B>",
       "dA, dB >= 1; the named factor is traced out", true},
      {"random_cptp", "random_cptp:<d>:<k>:<seed>",
       "d or <din>x<dout> >= 1; k in [1,64] with dout*k >= din; integer seed", true},
      {"compose", "compose:[a,b,...]", "maps applied left to right", false},
  };
}

std::optional<ZooInfo> zoo_describe(std::string_view name) {
  for (ZooInfo &info : zoo_list()) {
    if (info.name == name) return info;
  }
  return std::nullopt;
}

PetzTau petz_tau(const HermMatrix &x, const MapSpec &phi,
                 const TauCandidate &omega) {
  if (x.dim() != phi.dim_in || omega.matrix.dim() != phi.dim_out) {
    throw Error(ErrorKind::DimMismatch, "petz_tau",
                "X must live on the map's domain and omega on its codomain");
  }
  const HermMatrix phi_x = apply_map(phi, x);
  if (!is_positive_definite(herm_eig(phi_x))) {
    throw Error(ErrorKind::NotPositiveDefinite, "petz_tau",
                "Phi(X) is singular; regularize X before building tau");
  }
  const CMatrix p = inv_sqrt_pd(phi_x).mat();
  const CMatrix xh = sqrt_psd(x).mat();
  const CMatrix inner = apply_map(adjoint_map(phi), CMatrix(p * omega.matrix.mat() * p));
  const HermMatrix tau = hermitian_part(xh * inner * xh);
  return PetzTau{tau, !is_positive_definite(herm_eig(tau))};
}

SuperOp v_superop(const HermMatrix &x, const MapSpec &phi) {
  if (x.dim() != phi.dim_in) {
    throw Error(ErrorKind::DimMismatch, "v_superop", "X must live on the map's domain");
  }
  const HermMatrix phi_x = apply_map(phi, x);
  if (!is_positive_definite(herm_eig(phi_x))) {
    throw Error(ErrorKind::NotPositiveDefinite, "v_superop", "Phi(X) is singular");
  }
  const CMatrix p = inv_sqrt_pd(phi_x).mat();
  const CMatrix xh = sqrt_psd(x).mat();
  const MapSpec phi_star = adjoint_map(phi);
  return superop_from_action(phi.dim_out, phi.dim_in, [&](const CMatrix &rho) {
    return CMatrix(apply_map(phi_star, CMatrix(rho * p)) * xh);
  });
}

SchwarzTerms schwarz_terms(const MapSpec &phi_star, const CMatrix &rho,
                           const HermMatrix &sigma) {
  if (sigma.dim() != phi_star.dim_in || rho.rows() != phi_star.dim_in ||
      rho.cols() != phi_star.dim_in) {
    throw Error(ErrorKind::DimMismatch, "schwarz_margin",
                "rho and sigma must live on the map's domain");
  }
  const HermMatrix image_sigma = apply_map(phi_star, sigma);
  if (!is_positive_definite(herm_eig(image_sigma))) {
    throw Error(ErrorKind::NotPositiveDefinite, "schwarz_margin",
                "Phi*(sigma) is singular");
  }
  // bound and product nearly cancel when σ is ill-conditioned, so the
  // difference is formed in extended precision before the eigenvalue step
  using namespace detail;
  const LMatrix r = extend(rho);
  const LMatrix r_adj = r.adjoint();
  const LMatrix bound = apply_extended(phi_star, r_adj * solve(extend(sigma.mat()), r));
  const LMatrix product = apply_extended(phi_star, r_adj) *
                          solve(apply_extended(phi_star, extend(sigma.mat())), apply_extended(phi_star, r));
  return SchwarzTerms{hermitian_part(to_double(bound)), hermitian_part(to_double(product)),
                      psd_margin(hermitian_part(to_double(bound - product)))};
}

double schwarz_margin(const MapSpec &phi_star, const CMatrix &rho,
                      const HermMatrix &sigma) {
  return schwarz_terms(phi_star, rho, sigma).margin;
}

PositivityReport positivity_class(const MapSpec &phi, int trials,
                                  std::uint64_t seed) {
  PositivityReport r{};
  r.trials = trials;
  r.seed = seed;
  r.choi_margin = psd_margin(hermitian_part(choi_matrix(phi)));
  r.cp = r.choi_margin >= -kChoiTol;
  r.positive_min = HUGE_VAL;
  r.two_positive_min = HUGE_VAL;
  r.schwarz_min = HUGE_VAL;

  const int d = phi.dim_in;
  for (int t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, "positivity/positive", t);
    r.positive_min = std::min(r.positive_min, psd_margin(apply_map(phi, random_pure(rng, d))));
  }
  for (int t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, "positivity/two_positive", t);
    const HermMatrix psi = random_pure(rng, 2 * d);
    const int e = phi.dim_out;
    CMatrix out(2 * e, 2 * e);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        out.block(a * e, b * e, e, e) =
            apply_map(phi, CMatrix(psi.mat().block(a * d, b * d, d, d)));
      }
    }
    r.two_positive_min = std::min(r.two_positive_min, psd_margin(hermitian_part(out)));
  }
  for (int t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, "positivity/schwarz", t);
    const CMatrix rho = gaussian_matrix(rng, d, d);
    const HermMatrix sigma = random_density(rng, d);
    try {
      const SchwarzTerms terms = schwarz_terms(phi, rho, sigma);
      const double scaled =
          terms.margin / (1.0 + terms.bound.norm() + terms.product.norm());
      if (scaled < r.schwarz_min) {
        r.schwarz_min = scaled;
        r.schwarz_rho = rho;
        r.schwarz_sigma = sigma.mat();
      }
    } catch (const Error &err) {
      if (err.kind() != ErrorKind::NotPositiveDefinite) throw;
    }
  }
  r.positive_sampled = r.positive_min >= -kSampledPositivityTol;
  r.two_positive_sampled = r.two_positive_min >= -kSampledPositivityTol;
  r.schwarz_sampled = r.schwarz_min >= -kSampledPositivityTol;
  return r;
}

}  // namespace qfdiv
