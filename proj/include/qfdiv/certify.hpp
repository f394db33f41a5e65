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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qfdiv/fdiv.hpp"
#include "qfdiv/io.hpp"
#include "qfdiv/superop.hpp"

namespace qfdiv {

/// The tuple quantified over by the monotonicity theorem.
struct Instance {
  HermMatrix x = HermMatrix::identity(1);
  HermMatrix y = HermMatrix::identity(1);
  MapSpec phi;
  TauCandidate omega;
  FDivFn f = neglog_fn();

  static Instance make(HermMatrix x, HermMatrix y, MapSpec phi,
                       TauCandidate omega, FDivFn f = neglog_fn());
};

json instance_json(const Instance &inst);
Instance instance_from_json_value(const json &j);
Instance instance_from_file(const InstanceFile &file);

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

/// Secondary quantity carried by a report. Errors are checked as
/// value <= tolerance, margins as value >= -tolerance.
struct Metric {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool is_error = false;
  bool gating = false;
  bool ok() const { return is_error ? value <= tolerance : value >= -tolerance; }
};

struct CertReport {
  std::string check_name;
  int trials = 0;
  std::uint64_t seed = 0;
  double min_margin = 0.0;  // scaled, see README
  json worst_case_inputs;   // replayable with evaluate_inputs
  Verdict verdict = Verdict::inconclusive;
  double tolerance = 0.0;
  bool gating = true;
  int skipped = 0;          // samples dropped for a singular operand
  std::vector<Metric> metrics;
  std::string note;
  std::optional<json> shrunk;  // minimized counterexample, falsify only
  std::optional<std::string> fixture;
  double wall_time = 0.0;

  // a non-gating report never fails the build
  bool blocks() const { return gating && verdict == Verdict::fail; }
};

json report_to_json(const CertReport &r, bool timing = false);

// Raw quantities.

/// λ_min(Δ(Φ(Y),ω) − V†Δ(Y,τ)V) on the codomain's vectorized space.
double lemma_margin(const Instance &inst);

struct ChainReport {
  double lhs;        // ⟨ρ, V†Δ(Y,τ)V ρ⟩
  double middle;     // tr(Y Φ*(ρP) M⁻¹ Φ*(Pρ*)), P = Φ(X)^{-1/2}, M = Φ*(PωP)
  double bound;      // tr(Y Φ*(ρω⁻¹ρ*))
  double rhs;        // ⟨ρ, Δ(Φ(Y),ω) ρ⟩
  double first_equality_error;  // relative
  double last_equality_error;
  double slack;      // bound − middle
  double schwarz;    // schwarz_margin(Φ*, Pρ*, PωP)
};
ChainReport proof_chain_check(const Instance &inst, const CMatrix &rho);

enum class DpiMode { petz, optimized };
struct DpiSides {
  double lhs;
  double rhs;
  double margin;  // lhs − rhs
};
DpiSides dpi_sides(const Instance &inst, DpiMode mode,
                   const OptimizerConfig &cfg = {});

struct JensenTerms {
  double form_margin;      // ⟨ξ, V†f(S)V ξ⟩ − ⟨ξ, f(V†SV) ξ⟩, ξ = vec(Φ(X)^{1/2})
  double operator_margin;  // psd_margin(V†f(S)V − f(V†SV))
  double form_scale;       // |both quadratic forms|
  double operator_scale;   // ‖V†f(S)V‖ + ‖f(V†SV)‖
};
JensenTerms jensen_terms(const Instance &inst);

/// Margin of a replayable input record, exactly as the suites compute it.
double evaluate_inputs(const json &inputs);

struct ReplayResult {
  double recorded;
  double replayed;
  bool matches;  // within 1e-12
};
ReplayResult replay(const json &report);

// Suites.

struct SuiteOptions {
  int trials = -1;  // negative: suite default
  std::uint64_t seed = 42;
  int dim = 0;      // 0: mixed dimensions 2 and 3
  std::optional<std::string> channel;
  int threads = 1;
};

CertReport dpi_check(const Instance &inst, DpiMode mode,
                     const OptimizerConfig &cfg = {});
CertReport anti_monotone_check(const FDivFn &f, int dim, int trials,
                               std::uint64_t seed, int threads = 1);
CertReport remark_experiment(int trials, std::uint64_t seed, int threads = 1);

struct FalsifyOptions {
  std::string family;
  int budget = 100;
  std::uint64_t seed = 42;
  int threads = 1;
  std::optional<std::string> fixture_dir;
};
CertReport falsify_search(const FalsifyOptions &opts);

/// lemma, chain, dpi_petz, dpi_optimized, jensen, schwarz, antimonotone, remark
std::vector<std::string> suite_names();
/// Expands "all" and "dpi"; throws BadParameter for unknown names.
std::vector<std::string> expand_suite(const std::string &name);
CertReport run_suite(const std::string &name, const SuiteOptions &opts);

std::string write_fixture(const std::string &dir, const std::string &stem,
                          const json &body);

}  // namespace qfdiv
