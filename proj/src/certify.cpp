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

#include "qfdiv/certify.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>

#include "extended.hpp"
#include "qfdiv/error.hpp"
#include "qfdiv/parallel.hpp"
#include "qfdiv/random.hpp"
#include "qfdiv/zoo.hpp"

namespace qfdiv {

namespace {

constexpr double kLemmaTol = 1e-9;
constexpr double kChainTol = 1e-9;
constexpr double kEqualityTol = 1e-10;
constexpr double kPetzTol = 1e-8;
constexpr double kOptimizedTol = 1e-6;
constexpr double kJensenTol = 1e-9;
constexpr double kSchwarzTol = 1e-9;
constexpr double kAntiTol = 1e-9;
constexpr double kReplayTol = 1e-12;
constexpr double kDpiEps = 1e-8;  // regularization for a singular Y
constexpr int kChainRhos = 50;

const double kInf = std::numeric_limits<double>::infinity();

double scaled(double raw, double scale) { return raw / (1.0 + scale); }

double quad(const CVector &v, const CMatrix &m) { return (v.adjoint() * m * v)(0, 0).real(); }

bool is_cp(const MapSpec &phi) { return psd_margin(choi_of(phi)) >= -kChoiTol; }

HermMatrix petz_or_fallback(const Instance &inst, bool *fallback = nullptr) {
  const PetzTau p = petz_tau(inst.x, inst.phi, inst.omega);
  if (fallback) *fallback = p.singular;
  return p.singular ? tau_fallback(p.tau) : p.tau;
}

HermMatrix effective_target(const HermMatrix &y) {
  if (is_positive_definite(herm_eig(y))) return y;
  return regularize_target(y, kDpiEps);
}

// ---------------------------------------------------------------------------
// sampling

struct Dims {
  int a;
  int b;
};

Dims sample_dims(Rng &rng, int dim, bool codomain_not_larger = false) {
  if (dim > 0) return {dim, dim};
  const int a = uniform_int(rng, 2, 3);
  const int b = codomain_not_larger ? uniform_int(rng, 2, a) : uniform_int(rng, 2, 3);
  return {a, b};
}

std::string random_channel_grammar(Rng &rng, int da, int db) {
  const int kmin = std::max((da + db - 1) / db, (db + da - 1) / da);
  const int k = uniform_int(rng, kmin, kmin + 2);
  const auto seed = static_cast<std::uint64_t>(uniform_int(rng, 0, 999999999));
  return "random_cptp:" + std::to_string(da) + "x" + std::to_string(db) + ":" +
         std::to_string(k) + ":" + std::to_string(seed);
}

// channel named on the command line, or a fresh random CPTP map
MapSpec sample_channel(Rng &rng, const SuiteOptions &opts, bool codomain_not_larger = false) {
  if (opts.channel) return build_map(*opts.channel, opts.dim > 0 ? opts.dim : 2);
  const Dims d = sample_dims(rng, opts.dim, codomain_not_larger);
  return build_map(random_channel_grammar(rng, d.a, d.b));
}

Instance sample_instance(Rng &rng, MapSpec phi, FDivFn f = neglog_fn()) {
  HermMatrix x = random_density(rng, phi.dim_in);
  HermMatrix y = random_density(rng, phi.dim_in);
  const TauCandidate omega = TauCandidate::make(random_density(rng, phi.dim_out));
  return Instance::make(std::move(x), std::move(y), std::move(phi), omega, std::move(f));
}

// ---------------------------------------------------------------------------
// generic trial loop

struct MetricSlot {
  std::string name;
  double tolerance;
  bool is_error;
  bool gating;
};

struct TrialOutcome {
  bool skipped = false;
  double margin = kInf;
  json inputs;
  std::vector<double> metrics;  // one per slot
};

using TrialBody = std::function<TrialOutcome(int)>;

bool skippable(const Error &e) {
  return e.kind() == ErrorKind::NotPositiveDefinite;
}

void finish(CertReport &r) {
  bool metrics_ok = true;
  for (const Metric &m : r.metrics) {
    if (m.gating && !m.ok()) metrics_ok = false;
  }
  if (r.trials == 0 || r.skipped == r.trials) {
    r.verdict = Verdict::inconclusive;
  } else {
    r.verdict = (r.min_margin >= -r.tolerance && metrics_ok) ? Verdict::pass : Verdict::fail;
  }
}

CertReport run_trials(const std::string &name, int trials, std::uint64_t seed, int threads,
                      double tol, bool gating, const std::vector<MetricSlot> &slots,
                      const TrialBody &body) {
  const auto start = std::chrono::steady_clock::now();
  CertReport r;
  r.check_name = name;
  r.trials = std::max(trials, 0);
  r.seed = seed;
  r.tolerance = tol;
  r.gating = gating;
  r.min_margin = std::numeric_limits<double>::quiet_NaN();

  std::vector<TrialOutcome> out(static_cast<std::size_t>(r.trials));
  parallel_for(out.size(), threads, [&](std::size_t i) {
    try {
      out[i] = body(static_cast<int>(i));
    } catch (const Error &e) {
      if (!skippable(e)) throw;
      out[i] = TrialOutcome{};
      out[i].skipped = true;
    }
  });

  // merged in index order so the result does not depend on the schedule
  for (const MetricSlot &s : slots) {
    r.metrics.push_back(Metric{s.name, s.is_error ? 0.0 : kInf, s.tolerance, s.is_error, s.gating});
  }
  std::size_t worst = out.size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].skipped) {
      ++r.skipped;
      continue;
    }
    if (worst == out.size() || out[i].margin < out[worst].margin) worst = i;
    for (std::size_t k = 0; k < slots.size() && k < out[i].metrics.size(); ++k) {
      Metric &m = r.metrics[k];
      m.value = m.is_error ? std::max(m.value, out[i].metrics[k])
                           : std::min(m.value, out[i].metrics[k]);
    }
  }
  if (worst != out.size()) {
    r.min_margin = out[worst].margin;
    r.worst_case_inputs = out[worst].inputs;
  }
  finish(r);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// ---------------------------------------------------------------------------
// scaled margins, each a function of a replayable record

struct LemmaParts {
  double margin;
  double scale;
  bool fallback;
};

// The inequality holds for any invertible P and X^{1/2} once τ and V are
// built from the same two matrices, so both are taken as exact and the
// difference is formed in extended precision; ω⁻¹ and τ⁻¹ make it a small
// difference of large terms.
LemmaParts lemma_parts(const Instance &inst) {
  using namespace detail;
  const PetzTau petz = petz_tau(inst.x, inst.phi, inst.omega);
  if (petz.singular) {
    const HermMatrix tau = tau_fallback(petz.tau);
    const SuperOp v = v_superop(inst.x, inst.phi);
    const CMatrix big = rel_modular(apply_map(inst.phi, inst.y), inst.omega.matrix).matrix;
    const CMatrix diff = big - v.matrix.adjoint() * rel_modular(inst.y, tau).matrix * v.matrix;
    return {herm_eig(hermitian_part(diff)).min(), big.norm(), true};
  }
  const int da = inst.phi.dim_in;
  const int db = inst.phi.dim_out;
  const MapSpec phi_star = adjoint_map(inst.phi);
  const LMatrix p = extend(inv_sqrt_pd(apply_map(inst.phi, inst.x)).mat());
  const LMatrix xh = extend(sqrt_psd(inst.x).mat());
  const LMatrix omega = extend(inst.omega.matrix.mat());
  const LMatrix y = extend(inst.y.mat());

  const LMatrix tau = xh * apply_extended(phi_star, p * omega * p) * xh;
  const LMatrix tau_inv = solve(tau, LMatrix::Identity(da, da));
  LMatrix v(da * da, db * db);
  for (int k = 0; k < db; ++k) {
    for (int l = 0; l < db; ++l) {
      LMatrix e = LMatrix::Zero(db, db);
      e(k, l) = 1.0L;
      const LMatrix image = apply_extended(phi_star, e * p) * xh;
      for (int i = 0; i < da; ++i) {
        for (int j = 0; j < da; ++j) v(i * da + j, k * db + l) = image(i, j);
      }
    }
  }
  const LMatrix big = kron(apply_extended(inst.phi, y),
                           solve(omega, LMatrix::Identity(db, db)).transpose());
  const LMatrix small = kron(y, tau_inv.transpose());
  const LMatrix diff = big - v.adjoint() * small * v;
  return {psd_margin(hermitian_part(to_double(diff))), to_double(big).norm(), false};
}

double scaled_lemma(const Instance &inst) {
  const LemmaParts p = lemma_parts(inst);
  return scaled(p.margin, p.scale);
}

double equality_error(const ChainReport &c) {
  return std::max(c.first_equality_error, c.last_equality_error);
}

double scaled_chain(const ChainReport &c) {
  return scaled(c.slack, std::abs(c.bound) + std::abs(c.middle));
}

double scaled_dpi(const DpiSides &s) {
  return scaled(s.margin, std::abs(s.lhs) + std::abs(s.rhs));
}

double scaled_schwarz(const MapSpec &phi_star, const CMatrix &rho, const HermMatrix &sigma) {
  const SchwarzTerms t = schwarz_terms(phi_star, rho, sigma);
  return scaled(t.margin, t.bound.norm());
}

double scaled_anti(const FDivFn &f, const HermMatrix &a, const HermMatrix &b) {
  const HermMatrix fa = matrix_fn(a, f.eval);
  const HermMatrix fb = matrix_fn(b, f.eval);
  return scaled(psd_margin(fa - fb), fa.norm() + fb.norm());
}

OptimizerConfig optimizer_from(const json &j) {
  OptimizerConfig cfg;
  cfg.seed = j.at("optimizer_seed").get<std::uint64_t>();
  cfg.restarts = j.value("restarts", cfg.restarts);
  cfg.max_evals = j.value("max_evals", cfg.max_evals);
  cfg.threads = 1;
  return cfg;
}

json optimizer_json(const OptimizerConfig &cfg) {
  return json{{"optimizer_seed", cfg.seed}, {"restarts", cfg.restarts},
              {"max_evals", cfg.max_evals}};
}

json schwarz_inputs(const MapSpec &phi_star, const CMatrix &rho, const HermMatrix &sigma) {
  return json{{"kind", "schwarz"},
              {"phi_star", map_to_json(phi_star)},
              {"rho", matrix_to_json(rho)},
              {"sigma", matrix_to_json(sigma.mat())}};
}

json instance_inputs(const std::string &kind, const Instance &inst) {
  return json{{"kind", kind}, {"instance", instance_json(inst)}};
}

}  // namespace

// ---------------------------------------------------------------------------

Instance Instance::make(HermMatrix x, HermMatrix y, MapSpec phi, TauCandidate omega, FDivFn f) {
  if (x.dim() != y.dim() || x.dim() != phi.dim_in) {
    throw Error(ErrorKind::DimMismatch, "Instance", "X, Y and the channel's input differ");
  }
  if (omega.matrix.dim() != phi.dim_out) {
    throw Error(ErrorKind::DimMismatch, "Instance", "omega must live on the channel's output");
  }
  if (!is_positive_definite(herm_eig(omega.matrix))) {
    throw Error(ErrorKind::NotPositiveDefinite, "Instance", "omega must be positive definite");
  }
  return Instance{std::move(x), std::move(y), std::move(phi), std::move(omega), std::move(f)};
}

json instance_json(const Instance &inst) {
  InstanceFile file;
  file.dim_a = inst.phi.dim_in;
  file.dim_b = inst.phi.dim_out;
  file.x = inst.x;
  file.y = inst.y;
  file.omega = inst.omega.matrix;
  file.channel = map_to_json(inst.phi);
  file.f = inst.f.name;
  return instance_to_json(file);
}

Instance instance_from_file(const InstanceFile &file) {
  if (!file.channel) throw Error(ErrorKind::ParseError, "$.channel", "missing");
  if (!file.omega) throw Error(ErrorKind::ParseError, "$.omega", "missing");
  MapSpec phi = map_from_json(*file.channel, file.dim_a, "$.channel");
  FDivFn f = file.f ? find_fn(*file.f) : neglog_fn();
  return Instance::make(file.x, file.y, std::move(phi), TauCandidate::make(*file.omega),
                        std::move(f));
}

Instance instance_from_json_value(const json &j) { return instance_from_file(instance_from_json(j)); }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

json report_to_json(const CertReport &r, bool timing) {
  json j;
  j["version"] = kFormatVersion;
  j["check_name"] = r.check_name;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["min_margin"] = std::isfinite(r.min_margin) ? json(r.min_margin) : json(nullptr);
  j["tolerance"] = r.tolerance;
  j["verdict"] = to_string(r.verdict);
  j["gating"] = r.gating;
  j["skipped"] = r.skipped;
  j["worst_case_inputs"] = r.worst_case_inputs;
  json metrics = json::array();
  for (const Metric &m : r.metrics) {
    metrics.push_back(json{{"name", m.name},
                           {"value", std::isfinite(m.value) ? json(m.value) : json(nullptr)},
                           {"tolerance", m.tolerance},
                           {"kind", m.is_error ? "error" : "margin"},
                           {"gating", m.gating},
                           {"ok", m.ok()}});
  }
  j["metrics"] = metrics;
  if (!r.note.empty()) j["note"] = r.note;
  if (r.shrunk) j["shrunk"] = *r.shrunk;
  if (r.fixture) j["fixture"] = *r.fixture;
  if (timing) j["wall_time"] = r.wall_time;
  return j;
}

// ---------------------------------------------------------------------------

double lemma_margin(const Instance &inst) { return lemma_parts(inst).margin; }

ChainReport proof_chain_check(const Instance &inst, const CMatrix &rho) {
  const int db = inst.phi.dim_out;
  if (rho.rows() != db || rho.cols() != db) {
    throw Error(ErrorKind::DimMismatch, "proof_chain_check", "rho must live on the channel's output");
  }
  const MapSpec phi_star = adjoint_map(inst.phi);
  const HermMatrix &omega = inst.omega.matrix;
  const HermMatrix phi_x = apply_map(inst.phi, inst.x);
  if (!is_positive_definite(herm_eig(phi_x))) {
    throw Error(ErrorKind::NotPositiveDefinite, "proof_chain_check", "Phi(X) is singular");
  }
  const CMatrix p = inv_sqrt_pd(phi_x).mat();
  const HermMatrix tau = petz_or_fallback(inst);
  const SuperOp v = v_superop(inst.x, inst.phi);
  const CVector r = vec(rho);

  ChainReport c{};
  const CMatrix s = rel_modular(inst.y, tau).matrix;
  c.lhs = quad(r, v.matrix.adjoint() * s * v.matrix);

  const HermMatrix sigma = hermitian_part(p * omega.mat() * p);
  const HermMatrix m = apply_map(phi_star, sigma);
  const CMatrix left = apply_map(phi_star, CMatrix(rho * p));
  const CMatrix right = apply_map(phi_star, CMatrix(p * rho.adjoint()));
  c.middle = (inst.y.mat() * left * inv_pd(m).mat() * right).trace().real();

  const CMatrix inner = rho * inv_pd(omega).mat() * rho.adjoint();
  c.bound = (inst.y.mat() * apply_map(phi_star, inner)).trace().real();
  c.rhs = quad(r, rel_modular(apply_map(inst.phi, inst.y), omega).matrix);

  c.first_equality_error =
      std::abs(c.lhs - c.middle) / (1.0 + std::max(std::abs(c.lhs), std::abs(c.middle)));
  c.last_equality_error =
      std::abs(c.bound - c.rhs) / (1.0 + std::max(std::abs(c.bound), std::abs(c.rhs)));
  c.slack = c.bound - c.middle;
  c.schwarz = schwarz_margin(phi_star, CMatrix(p * rho.adjoint()), sigma);
  return c;
}

DpiSides dpi_sides(const Instance &inst, DpiMode mode, const OptimizerConfig &cfg) {
  const HermMatrix y = effective_target(inst.y);
  const HermMatrix phi_x = apply_map(inst.phi, inst.x);
  const HermMatrix phi_y = apply_map(inst.phi, y);
  DpiSides s{};
  if (mode == DpiMode::petz) {
    const TauCandidate tau = TauCandidate::make(petz_or_fallback(inst), inst.omega.trace_budget);
    s.lhs = q_f_tensor(inst.x, y, tau, inst.f);
    s.rhs = q_f_tensor(phi_x, phi_y, inst.omega, inst.f);
  } else {
    s.lhs = q_f_optimized(inst.x, y, inst.f, cfg).value;
    s.rhs = q_f_optimized(phi_x, phi_y, inst.f, cfg).value;
  }
  s.margin = s.lhs - s.rhs;
  return s;
}

JensenTerms jensen_terms(const Instance &inst) {
  const HermMatrix tau = petz_or_fallback(inst);
  const SuperOp v = v_superop(inst.x, inst.phi);
  const SuperOp s = rel_modular(inst.y, tau);
  const CMatrix f_s = superop_fn(s, inst.f.eval).matrix;
  const HermMatrix outer = hermitian_part(v.matrix.adjoint() * f_s * v.matrix);
  const HermMatrix compressed = hermitian_part(v.matrix.adjoint() * s.matrix * v.matrix);
  const HermMatrix f_compressed = matrix_fn(compressed, inst.f.eval);
  const CVector xi = vec(sqrt_psd(apply_map(inst.phi, inst.x)).mat());
  const double q_outer = quad(xi, outer.mat());
  const double q_inner = quad(xi, f_compressed.mat());
  JensenTerms t{};
  t.form_margin = q_outer - q_inner;
  t.form_scale = std::abs(q_outer) + std::abs(q_inner);
  t.operator_margin = psd_margin(outer - f_compressed);
  t.operator_scale = outer.norm() + f_compressed.norm();
  return t;
}

double evaluate_inputs(const json &j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw Error(ErrorKind::ParseError, "$.kind", "not a replayable input record");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "schwarz") {
    const MapSpec phi_star = map_from_json(j.at("phi_star"), 0, "$.phi_star");
    return scaled_schwarz(phi_star, matrix_from_json(j.at("rho"), "$.rho"),
                          herm_from_json(j.at("sigma"), "$.sigma"));
  }
  if (kind == "antimonotone") {
    return scaled_anti(find_fn(j.at("f").get<std::string>()), herm_from_json(j.at("a"), "$.a"),
                       herm_from_json(j.at("b"), "$.b"));
  }
  const Instance inst = instance_from_json_value(j.at("instance"));
  if (kind == "lemma") return scaled_lemma(inst);
  if (kind == "chain") {
    return scaled_chain(proof_chain_check(inst, matrix_from_json(j.at("rho"), "$.rho")));
  }
  if (kind == "dpi_petz") return scaled_dpi(dpi_sides(inst, DpiMode::petz));
  if (kind == "dpi_optimized") {
    return scaled_dpi(dpi_sides(inst, DpiMode::optimized, optimizer_from(j)));
  }
  if (kind == "jensen") {
    const JensenTerms t = jensen_terms(inst);
    return scaled(t.form_margin, t.form_scale);
  }
  throw Error(ErrorKind::ParseError, "$.kind", "unknown record kind '" + kind + "'");
}

ReplayResult replay(const json &report) {
  if (!report.contains("min_margin") || report["min_margin"].is_null()) {
    throw Error(ErrorKind::BadParameter, "replay", "report has no worst case to replay");
  }
  ReplayResult r{};
  r.recorded = report["min_margin"].get<double>();
  r.replayed = evaluate_inputs(report.at("worst_case_inputs"));
  r.matches = std::abs(r.recorded - r.replayed) <= kReplayTol;
  return r;
}

// ---------------------------------------------------------------------------
// single checks

CertReport dpi_check(const Instance &inst, DpiMode mode, const OptimizerConfig &cfg) {
  const bool petz = mode == DpiMode::petz;
  const std::string name = petz ? "dpi_petz" : "dpi_optimized";
  OptimizerConfig c = cfg;
  c.threads = 1;
  return run_trials(name, 1, cfg.seed, 1, petz ? kPetzTol : kOptimizedTol,
                    is_cp(inst.phi) && inst.phi.trace_preserving, {}, [&](int) {
                      TrialOutcome t;
                      t.inputs = instance_inputs(name, inst);
                      if (!petz) t.inputs.update(optimizer_json(c));
                      t.margin = evaluate_inputs(t.inputs);
                      return t;
                    });
}

CertReport anti_monotone_check(const FDivFn &f, int dim, int trials, std::uint64_t seed,
                               int threads) {
  if (dim < 2 || dim > 4) {
    throw Error(ErrorKind::BadParameter, "anti_monotone_check", "dim must be 2, 3 or 4");
  }
  CertReport r = run_trials(
      "antimonotone:" + f.name, trials, seed, threads, kAntiTol, f.anti_monotone_claim, {},
      [&](int i) {
        Rng rng = make_rng(seed, "antimonotone." + f.name, static_cast<std::uint64_t>(i));
        const HermMatrix a = random_density(rng, dim);
        const CMatrix g = gaussian_matrix(rng, dim, dim);
        const HermMatrix b = a + hermitian_part(g.adjoint() * g);
        TrialOutcome t;
        t.inputs = json{{"kind", "antimonotone"},
                        {"f", f.name},
                        {"a", matrix_to_json(a.mat())},
                        {"b", matrix_to_json(b.mat())}};
        t.margin = evaluate_inputs(t.inputs);
        return t;
      });
  if (!f.anti_monotone_claim) r.note = "control: not claimed operator anti-monotone";
  return r;
}

// ---------------------------------------------------------------------------
// suites

namespace {

bool hypotheses_hold(const SuiteOptions &opts) {
  if (!opts.channel) return true;
  const MapSpec phi = build_map(*opts.channel, opts.dim > 0 ? opts.dim : 2);
  return is_cp(phi) && phi.trace_preserving;
}

std::string experiment_note(const SuiteOptions &opts) {
  return "experiment: channel '" + *opts.channel +
         "' is outside the theorem's hypotheses, result is a finding";
}

CertReport lemma_suite(const SuiteOptions &o, int trials) {
  return run_trials("lemma", trials, o.seed, o.threads, kLemmaTol, true,
                    {{"tau_fallbacks", 0.0, true, false}}, [&](int i) {
                      Rng rng = make_rng(o.seed, "lemma", static_cast<std::uint64_t>(i));
                      const Instance inst = sample_instance(rng, sample_channel(rng, o));
                      TrialOutcome t;
                      t.inputs = instance_inputs("lemma", inst);
                      t.margin = evaluate_inputs(t.inputs);
                      t.metrics = {lemma_parts(inst).fallback ? 1.0 : 0.0};
                      return t;
                    });
}

CertReport chain_suite(const SuiteOptions &o, int trials) {
  return run_trials(
      "chain", trials, o.seed, o.threads, kChainTol, true,
      {{"equality_error", kEqualityTol, true, true}, {"schwarz_at_chain_min", kChainTol, false, false}},
      [&](int i) {
        Rng rng = make_rng(o.seed, "chain", static_cast<std::uint64_t>(i));
        const Instance inst = sample_instance(rng, sample_channel(rng, o));
        TrialOutcome t;
        double eq = 0.0;
        double schwarz = kInf;
        for (int k = 0; k < kChainRhos; ++k) {
          const CMatrix rho = gaussian_matrix(rng, inst.phi.dim_out, inst.phi.dim_out);
          const ChainReport c = proof_chain_check(inst, rho);
          eq = std::max(eq, equality_error(c));
          schwarz = std::min(schwarz, c.schwarz);
          const double m = scaled_chain(c);
          if (m < t.margin) {
            t.margin = m;
            t.inputs = instance_inputs("chain", inst);
            t.inputs["rho"] = matrix_to_json(rho);
          }
        }
        t.metrics = {eq, schwarz};
        return t;
      });
}

CertReport dpi_petz_suite(const SuiteOptions &o, int trials) {
  const std::vector<FDivFn> fs = anti_monotone_catalog();
  return run_trials("dpi_petz", trials, o.seed, o.threads, kPetzTol, true, {}, [&](int i) {
    Rng rng = make_rng(o.seed, "dpi_petz", static_cast<std::uint64_t>(i));
    Instance inst = sample_instance(rng, sample_channel(rng, o));
    TrialOutcome t;
    for (const FDivFn &f : fs) {
      inst.f = f;
      const double m = scaled_dpi(dpi_sides(inst, DpiMode::petz));
      if (m < t.margin) {
        t.margin = m;
        t.inputs = instance_inputs("dpi_petz", inst);
      }
    }
    return t;
  });
}

CertReport dpi_optimized_suite(const SuiteOptions &o, int trials) {
  SuiteOptions at2 = o;
  if (at2.dim == 0) at2.dim = 2;
  const std::vector<FDivFn> fs = anti_monotone_catalog();
  return run_trials("dpi_optimized", trials, o.seed, o.threads, kOptimizedTol, true, {},
                    [&](int i) {
                      Rng rng = make_rng(o.seed, "dpi_optimized", static_cast<std::uint64_t>(i));
                      const FDivFn &f = fs[static_cast<std::size_t>(i) % fs.size()];
                      const Instance inst = sample_instance(rng, sample_channel(rng, at2), f);
                      OptimizerConfig cfg;
                      cfg.seed = derive_seed(o.seed, "dpi_optimized.opt", static_cast<std::uint64_t>(i));
                      TrialOutcome t;
                      t.inputs = instance_inputs("dpi_optimized", inst);
                      t.inputs.update(optimizer_json(cfg));
                      t.margin = evaluate_inputs(t.inputs);
                      return t;
                    });
}

CertReport jensen_suite(const SuiteOptions &o, int trials) {
  const std::vector<FDivFn> fs = anti_monotone_catalog();
  CertReport r = run_trials(
      "jensen", trials, o.seed, o.threads, kJensenTol, true,
      {{"operator_form_min", kJensenTol, false, false}}, [&](int i) {
        Rng rng = make_rng(o.seed, "jensen", static_cast<std::uint64_t>(i));
        const FDivFn &f = fs[static_cast<std::size_t>(i) % fs.size()];
        // V†SV is singular when the codomain is larger than the domain
        const Instance inst = sample_instance(rng, sample_channel(rng, o, true), f);
        TrialOutcome t;
        t.inputs = instance_inputs("jensen", inst);
        t.margin = evaluate_inputs(t.inputs);
        const JensenTerms j = jensen_terms(inst);
        t.metrics = {scaled(j.operator_margin, j.operator_scale)};
        return t;
      });
  r.note = "gates on the quadratic form at vec(Phi(X)^{1/2}); operator_form_min is a finding";
  return r;
}

CertReport schwarz_suite(const SuiteOptions &o, int trials) {
  return run_trials("schwarz", trials, o.seed, o.threads, kSchwarzTol, true, {}, [&](int i) {
    Rng rng = make_rng(o.seed, "schwarz", static_cast<std::uint64_t>(i));
    const MapSpec phi_star = adjoint_map(sample_channel(rng, o));
    const int d = phi_star.dim_in;
    const CMatrix rho = gaussian_matrix(rng, d, d);
    const HermMatrix sigma = random_density(rng, d);
    TrialOutcome t;
    t.inputs = schwarz_inputs(phi_star, rho, sigma);
    t.margin = evaluate_inputs(t.inputs);
    return t;
  });
}

CertReport antimonotone_suite(const SuiteOptions &o, int trials) {
  const std::vector<FDivFn> fs = anti_monotone_catalog();
  const FDivFn control = square_fn();
  CertReport r = run_trials(
      "antimonotone", trials, o.seed, o.threads, kAntiTol, true,
      {{"square_control_min", kAntiTol, false, false}}, [&](int i) {
        Rng rng = make_rng(o.seed, "antimonotone", static_cast<std::uint64_t>(i));
        const std::size_t n = fs.size();
        const FDivFn &f = fs[static_cast<std::size_t>(i) % n];
        const int dim = o.dim > 0 ? o.dim : 2 + static_cast<int>((static_cast<std::size_t>(i) / n) % 3);
        const HermMatrix a = random_density(rng, dim);
        const CMatrix g = gaussian_matrix(rng, dim, dim);
        const HermMatrix b = a + hermitian_part(g.adjoint() * g);
        TrialOutcome t;
        t.inputs = json{{"kind", "antimonotone"},
                        {"f", f.name},
                        {"a", matrix_to_json(a.mat())},
                        {"b", matrix_to_json(b.mat())}};
        t.margin = evaluate_inputs(t.inputs);
        t.metrics = {scaled_anti(control, a, b)};
        return t;
      });
  r.note = "square_control_min is a negative control and is expected to be negative";
  return r;
}

CMatrix unit(int d, int i, int j) {
  CMatrix e = CMatrix::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

}  // namespace

CertReport remark_experiment(int trials, std::uint64_t seed, int threads) {
  CertReport r = run_trials("remark", trials, seed, threads, kSchwarzTol, false, {}, [&](int i) {
    TrialOutcome t;
    if (i == 0) {
      t.inputs = schwarz_inputs(transpose_map(2), unit(2, 0, 1), HermMatrix::identity(2));
    } else {
      Rng rng = make_rng(seed, "remark", static_cast<std::uint64_t>(i));
      const int d = 2 + i % 2;
      t.inputs = schwarz_inputs(transpose_map(d), gaussian_matrix(rng, d, d), random_density(rng, d));
    }
    t.margin = evaluate_inputs(t.inputs);
    return t;
  });
  if (r.trials == 0) return r;

  // measured facts alongside the sampled Schwarz margins
  const int extra = std::min(r.trials, 20);
  const MapSpec t2 = transpose_map(2);
  r.metrics.push_back(Metric{"fixture_schwarz_margin",
                             schwarz_margin(t2, unit(2, 0, 1), HermMatrix::identity(2)), kSchwarzTol,
                             false, false});
  r.metrics.push_back(Metric{"transpose_choi_min_eig", psd_margin(choi_of(t2)), kChoiTol, false, false});

  double hermitian_min = kInf;
  double petz_min = kInf;
  double lemma_min = kInf;
  for (int i = 0; i < extra; ++i) {
    Rng rng = make_rng(seed, "remark.extra", static_cast<std::uint64_t>(i));
    const int d = 2 + i % 2;
    const MapSpec t = transpose_map(d);
    const HermMatrix rho = random_hermitian(rng, d);
    const CMatrix g = gaussian_matrix(rng, d, d).real().cast<Complex>();
    const HermMatrix sigma = hermitian_part(g.adjoint() * g + 0.1 * CMatrix::Identity(d, d));
    hermitian_min = std::min(hermitian_min, scaled_schwarz(t, rho.mat(), sigma));
    const Instance inst =
        sample_instance(rng, t, anti_monotone_catalog()[static_cast<std::size_t>(i) % 4]);
    petz_min = std::min(petz_min, scaled_dpi(dpi_sides(inst, DpiMode::petz)));
    lemma_min = std::min(lemma_min, scaled_lemma(inst));
  }
  r.metrics.push_back(Metric{"hermitian_real_sigma_min", hermitian_min, kSchwarzTol, false, false});
  r.metrics.push_back(Metric{"dpi_petz_transpose_min", petz_min, kPetzTol, false, false});
  r.metrics.push_back(Metric{"lemma_transpose_min", lemma_min, kLemmaTol, false, false});

  Rng rng = make_rng(seed, "remark.optimized", 0);
  OptimizerConfig cfg;
  cfg.seed = derive_seed(seed, "remark.optimized", 1);
  const Instance inst = sample_instance(rng, t2);
  r.metrics.push_back(Metric{"dpi_optimized_transpose_d2",
                             scaled_dpi(dpi_sides(inst, DpiMode::optimized, cfg)), kOptimizedTol,
                             false, false});
  r.note = "transpose map as the adjoint channel; measured margins, not a claim";
  return r;
}

// ---------------------------------------------------------------------------
// counterexample search

namespace {

MapSpec sample_family(Rng &rng, const std::string &family) {
  const int d = uniform_int(rng, 2, 3);
  auto fmt = [](double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", p);
    return std::string(buf);
  };
  if (family == "random_cptp") {
    const Dims dims = sample_dims(rng, 0);
    return build_map(random_channel_grammar(rng, dims.a, dims.b));
  }
  if (family == "transpose") return build_map("transpose", d);
  if (family == "transpose_cptp") {
    return build_map("compose:[" + random_channel_grammar(rng, d, d) + ",transpose]");
  }
  if (family == "depolarizing") return build_map("depolarizing:" + fmt(uniform(rng)), d);
  if (family == "dephasing") return build_map("dephasing:" + fmt(uniform(rng)), d);
  if (family == "amplitude_damping") return build_map("amplitude_damping:" + fmt(uniform(rng)), 2);
  return build_map(family, d);  // a literal grammar string
}

// drop or halve off-diagonal mass, then diagonal entries, then pull σ
// toward I/d
json shrink_schwarz(json inputs, double tol, int *rounds_used) {
  const MapSpec phi_star = map_from_json(inputs["phi_star"], 0);
  CMatrix rho = matrix_from_json(inputs["rho"]);
  HermMatrix sigma = herm_from_json(inputs["sigma"]);
  const int d = static_cast<int>(rho.rows());
  double margin = scaled_schwarz(phi_star, rho, sigma);
  // keep at least half of the violation so the fixture stays meaningful
  const double keep = std::min(-tol, 0.5 * margin);
  int rounds = 0;
  for (; rounds < 50; ++rounds) {
    std::vector<std::pair<CMatrix, HermMatrix>> candidates;
    for (const double factor : {0.0, 0.5}) {
      CMatrix off = rho;
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          if (i != j) off(i, j) *= factor;
        }
      }
      if (off != rho) candidates.emplace_back(off, sigma);
    }
    for (int i = 0; i < d; ++i) {
      for (const double factor : {0.0, 0.5}) {
        CMatrix diag = rho;
        diag(i, i) *= factor;
        if (diag != rho) candidates.emplace_back(diag, sigma);
      }
    }
    candidates.emplace_back(rho, (sigma + HermMatrix::identity(d) * (sigma.trace() / d)) * 0.5);
    bool moved = false;
    for (const auto &[r, s] : candidates) {
      double m = 0.0;
      try {
        m = scaled_schwarz(phi_star, r, s);
      } catch (const Error &) {
        continue;
      }
      if (m < keep) {
        rho = r;
        sigma = s;
        margin = m;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  *rounds_used = rounds;
  json out = schwarz_inputs(phi_star, rho, sigma);
  out["margin"] = margin;
  return out;
}

std::string sanitize(const std::string &s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '-';
  return out;
}

}  // namespace

CertReport falsify_search(const FalsifyOptions &opts) {
  const std::vector<FDivFn> fs = anti_monotone_catalog();
  // a violation is only a contradiction when the family's maps are channels
  bool family_cp = false;
  {
    Rng probe = make_rng(opts.seed, "falsify.probe", 0);
    const MapSpec phi = sample_family(probe, opts.family);
    family_cp = is_cp(phi) && phi.trace_preserving && opts.family != "transpose_cptp";
  }
  const std::string stream = "falsify." + opts.family;
  std::vector<json> dpi_inputs(static_cast<std::size_t>(std::max(opts.budget, 0)));
  CertReport r = run_trials(
      "falsify:" + opts.family, opts.budget, opts.seed, opts.threads, kSchwarzTol, family_cp,
      {{"dpi_petz_min", kPetzTol, false, family_cp}}, [&](int i) {
        Rng rng = make_rng(opts.seed, stream, static_cast<std::uint64_t>(i));
        const MapSpec phi = sample_family(rng, opts.family);
        const MapSpec phi_star = adjoint_map(phi);
        const int d = phi_star.dim_in;
        TrialOutcome t;
        t.inputs = schwarz_inputs(phi_star, gaussian_matrix(rng, d, d), random_density(rng, d));
        t.margin = evaluate_inputs(t.inputs);
        double dpi = kInf;
        try {
          const Instance inst =
              sample_instance(rng, phi, fs[static_cast<std::size_t>(i) % fs.size()]);
          dpi_inputs[static_cast<std::size_t>(i)] = instance_inputs("dpi_petz", inst);
          dpi = evaluate_inputs(dpi_inputs[static_cast<std::size_t>(i)]);
        } catch (const Error &e) {
          if (!skippable(e)) throw;
        }
        t.metrics = {dpi};
        return t;
      });

  if (r.verdict == Verdict::fail && r.min_margin < -r.tolerance) {
    int rounds = 0;
    json shrunk = shrink_schwarz(r.worst_case_inputs, r.tolerance, &rounds);
    shrunk["family"] = opts.family;
    shrunk["seed"] = opts.seed;
    shrunk["shrink_rounds"] = rounds;
    r.shrunk = shrunk;
    if (opts.fixture_dir) {
      r.fixture = write_fixture(*opts.fixture_dir,
                                "falsify_" + sanitize(opts.family) + "_" + std::to_string(opts.seed),
                                shrunk);
    }
  }
  if (!r.metrics.empty() && !r.metrics[0].ok() && opts.fixture_dir) {
    // no shrinking for DPI records, the worst one is kept as found
    double worst = kInf;
    json record;
    for (const json &j : dpi_inputs) {
      if (j.is_null()) continue;
      const double m = evaluate_inputs(j);
      if (m < worst) {
        worst = m;
        record = j;
      }
    }
    record["margin"] = worst;
    write_fixture(*opts.fixture_dir,
                  "falsify_" + sanitize(opts.family) + "_" + std::to_string(opts.seed) + "_dpi",
                  record);
  }
  if (!family_cp) r.note = "family is outside the theorem's hypotheses; violations are findings";
  return r;
}

std::string write_fixture(const std::string &dir, const std::string &stem, const json &body) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / (stem + ".json")).string();
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::BadParameter, "write_fixture", "cannot write '" + path + "'");
  out << body.dump(2) << "\n";
  return path;
}

std::vector<std::string> suite_names() {
  return {"lemma", "chain", "dpi_petz", "dpi_optimized", "jensen", "schwarz", "antimonotone", "remark"};
}

std::vector<std::string> expand_suite(const std::string &name) {
  if (name == "all") return suite_names();
  if (name == "dpi") return {"dpi_petz", "dpi_optimized"};
  for (const std::string &s : suite_names()) {
    if (s == name) return {s};
  }
  throw Error(ErrorKind::BadParameter, "verify", "unknown suite '" + name + "'");
}

CertReport run_suite(const std::string &name, const SuiteOptions &opts) {
  if (opts.dim != 0 && (opts.dim < 2 || opts.dim > 3)) {
    throw Error(ErrorKind::BadParameter, "verify", "--dim must be 2 or 3");
  }
  auto trials = [&](int fallback) { return opts.trials >= 0 ? opts.trials : fallback; };
  CertReport r;
  if (name == "lemma") {
    r = lemma_suite(opts, trials(200));
  } else if (name == "chain") {
    r = chain_suite(opts, trials(50));
  } else if (name == "dpi_petz") {
    r = dpi_petz_suite(opts, trials(200));
  } else if (name == "dpi_optimized") {
    r = dpi_optimized_suite(opts, trials(30));
  } else if (name == "jensen") {
    r = jensen_suite(opts, trials(200));
  } else if (name == "schwarz") {
    r = schwarz_suite(opts, trials(1000));
  } else if (name == "antimonotone") {
    r = antimonotone_suite(opts, trials(200));
  } else if (name == "remark") {
    r = remark_experiment(trials(200), opts.seed, opts.threads);
  } else {
    throw Error(ErrorKind::BadParameter, "verify", "unknown suite '" + name + "'");
  }
  if (opts.channel && name != "remark" && name != "antimonotone" && !hypotheses_hold(opts)) {
    r.gating = false;
    r.note = experiment_note(opts);
  }
  return r;
}

}  // namespace qfdiv
