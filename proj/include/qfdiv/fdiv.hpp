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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qfdiv/hermitian.hpp"

namespace qfdiv {

enum class ClosedFormSup { none, inverse, neglog };

/// Scalar function on (0, ∞) together with what is claimed about it.
struct FDivFn {
  std::string name;
  std::function<double(double)> eval;
  bool anti_monotone_claim = false;
  ClosedFormSup closed_form_sup = ClosedFormSup::none;

  double operator()(double x) const { return eval(x); }
};

FDivFn neglog_fn();
/// x ↦ x^{−t}; operator anti-monotone for t ∈ (0, 1].
FDivFn pow_fn(double t);
/// x ↦ x², the negative control.
FDivFn square_fn();

/// neglog, pow_0.25, pow_0.5, pow_1, square.
std::vector<FDivFn> catalog();
std::vector<FDivFn> anti_monotone_catalog();
/// Accepts "neglog", "square", "pow_<t>" and "pow:<t>".
FDivFn find_fn(std::string_view name);

/// Positive definite τ with tr τ ≤ trace_budget (+1e-12).
struct TauCandidate {
  HermMatrix matrix;
  double trace_budget = 1.0;

  static TauCandidate make(const HermMatrix &tau, double trace_budget = 1.0);
};

/// (1 − ε)τ + ε·I/d with ε = 1e-9·d; keeps tr ≤ 1 when tr τ ≤ 1.
HermMatrix tau_fallback(const HermMatrix &tau);

/// ⟨φ^X| f(τ⁻¹ ⊗ Zᵀ) |φ^X⟩ with |φ^X⟩ = (X^{1/2} ⊗ I)|Γ⟩.
double q_f_tensor(const HermMatrix &x, const HermMatrix &z,
                  const TauCandidate &tau, const FDivFn &f);

/// ⟨X^{1/2}, f(Δ(Z, τ))(X^{1/2})⟩ through rel_modular and superop_fn.
double q_f_modular(const HermMatrix &x, const HermMatrix &z,
                   const TauCandidate &tau, const FDivFn &f);

/// Σ_ij f(z_i / t_j) |⟨u_i| X^{1/2} |v_j⟩|² from the eigenpairs of Z and τ.
/// Numerically the most stable route when τ is close to singular.
double q_f_factored(const HermMatrix &x, const HermMatrix &z,
                    const TauCandidate &tau, const FDivFn &f);

/// Y + ε Π_Y^⊥.
HermMatrix regularize_target(const HermMatrix &y, double eps);

/// τ(θ) = (1 − δ) G G† / tr(G G†) + δ I/d, with G built from the 2d² reals θ
/// (real parts first).
HermMatrix tau_from_params(const std::vector<double> &theta, int d,
                           double floor);

struct OptimizerConfig {
  int restarts = 8;
  int max_evals = 2000;
  double opt_tol = 1e-6;
  double tau_floor = 1e-9;
  std::vector<double> eps_ladder = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  std::optional<double> fixed_eps;
  bool force = false;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct LadderStep {
  double eps;
  double value;
};

struct OptResult {
  double value;
  TauCandidate tau_star;
  double epsilon_used;  // 0 when Y is already invertible
  int restarts;
  bool converged;
  double trace_at_opt;
  int evaluations;
  std::vector<LadderStep> ladder;
  bool ladder_monotone;
  std::optional<double> closed_form;
};

/// sup over τ > 0 with tr τ ≤ 1 (and over ε on the ladder when Y is singular)
/// of q_f(X ‖ Y + εΠ_Y^⊥; τ), by multi-start Nelder–Mead.
OptResult q_f_optimized(const HermMatrix &x, const HermMatrix &y,
                        const FDivFn &f, const OptimizerConfig &cfg = {});

/// Closed-form supremum for f = x⁻¹ (λ_max(X^{1/2}Y⁻¹X^{1/2})) and for
/// f = −log (tr X log X − tr X log Y − tr X log tr X). Requires Y invertible.
std::optional<double> closed_form_sup(const HermMatrix &x, const HermMatrix &y,
                                      const FDivFn &f);

}  // namespace qfdiv
