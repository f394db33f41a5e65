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
#include <string_view>
#include <vector>

#include "qfdiv/fdiv.hpp"
#include "qfdiv/superop.hpp"

namespace qfdiv {

// Grammar accepted by parse_zoo / build_map:
//   identity | transpose
//   depolarizing:<p> | dephasing:<p> | amplitude_damping:<g>
//   unitary:<file>
//   partial_trace:<dA>x<dB>:<A|B>        (names the factor traced out)
//   random_cptp:<d>:<k>:<seed> | random_cptp:<din>x<dout>:<k>:<seed>
//   compose:[a,b,...]                    (a is applied first)
struct ZooEntry {
  std::string name;
  std::vector<std::string> params;
  std::string text;
};

ZooEntry parse_zoo(std::string_view grammar);

/// Builds the map. `dim` fixes the input dimension of entries whose grammar
/// carries none (identity, transpose, depolarizing, dephasing); 0 means 2.
MapSpec build(const ZooEntry &entry, int dim = 0);
MapSpec build_map(std::string_view grammar, int dim = 0);

struct ZooInfo {
  std::string name;
  std::string grammar;
  std::string parameters;
  bool completely_positive;
};

std::vector<ZooInfo> zoo_list();
std::optional<ZooInfo> zoo_describe(std::string_view name);

/// Kraus operators of a Haar-ish random channel: consecutive dim_out-row blocks
/// of a QR-orthonormalized Gaussian (dim_out·k × dim_in) isometry.
MapSpec random_cptp(int dim_in, int dim_out, int env_dim, std::uint64_t seed);
MapSpec transpose_map(int d);

struct PetzTau {
  HermMatrix tau;
  bool singular;  // true when τ is not invertible and needs tau_fallback
};

/// τ = X^{1/2} Φ*(Φ(X)^{-1/2} ω Φ(X)^{-1/2}) X^{1/2}.
PetzTau petz_tau(const HermMatrix &x, const MapSpec &phi,
                 const TauCandidate &omega);

/// V(ρ) = Φ*(ρ Φ(X)^{-1/2}) X^{1/2}, from operators on Φ's codomain to
/// operators on its domain.
SuperOp v_superop(const HermMatrix &x, const MapSpec &phi);

struct SchwarzTerms {
  HermMatrix bound;   // Φ*(ρ* σ⁻¹ ρ)
  HermMatrix product; // Φ*(ρ*) Φ*(σ)⁻¹ Φ*(ρ)
  double margin;      // λ_min(bound − product)
};

SchwarzTerms schwarz_terms(const MapSpec &phi_star, const CMatrix &rho,
                           const HermMatrix &sigma);
/// λ_min(Φ*(ρ*σ⁻¹ρ) − Φ*(ρ*)Φ*(σ)⁻¹Φ*(ρ)); non-negative iff the Schwarz-type
/// inequality holds at (ρ, σ).
double schwarz_margin(const MapSpec &phi_star, const CMatrix &rho,
                      const HermMatrix &sigma);

struct PositivityReport {
  bool cp;                    // exact, from the Choi spectrum
  double choi_margin;
  bool positive_sampled;      // sampled verdicts: a fail is a proof,
  double positive_min;        // a pass is only evidence
  bool two_positive_sampled;
  double two_positive_min;
  bool schwarz_sampled;
  double schwarz_min;
  std::optional<CMatrix> schwarz_rho;  // witness for the worst Schwarz margin
  std::optional<CMatrix> schwarz_sigma;
  int trials;
  std::uint64_t seed;
};

inline constexpr double kSampledPositivityTol = 1e-9;
inline constexpr double kChoiTol = 1e-10;

PositivityReport positivity_class(const MapSpec &phi, int trials,
                                  std::uint64_t seed);

}  // namespace qfdiv
