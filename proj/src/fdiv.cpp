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

#include "qfdiv/fdiv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "qfdiv/error.hpp"
#include "qfdiv/nelder_mead.hpp"
#include "qfdiv/parallel.hpp"
#include "qfdiv/random.hpp"
#include "qfdiv/superop.hpp"

namespace qfdiv {

namespace {

constexpr double kNonRealTol = 1e-9;

std::string format_exponent(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

void require_same_dim(const HermMatrix &x, const HermMatrix &z,
                      const TauCandidate &tau, const char *op) {
  if (x.dim() != z.dim() || x.dim() != tau.matrix.dim()) {
    throw Error(ErrorKind::DimMismatch, op,
                "X, Z and tau must share a dimension (" +
                    std::to_string(x.dim()) + ", " + std::to_string(z.dim()) +
                    ", " + std::to_string(tau.matrix.dim()) + ")");
  }
}

EigDecomp require_pd(const HermMatrix &m, const char *op, const char *what) {
  EigDecomp eig = herm_eig(m);
  if (!is_positive_definite(eig)) {
    throw Error(ErrorKind::NotPositiveDefinite, op,
                std::string(what) + " is not positive definite (min eigenvalue " +
                    std::to_string(eig.min()) + ")");
  }
  return eig;
}

double real_part_checked(Complex value, const char *op) {
  if (std::abs(value.imag()) > kNonRealTol * (1.0 + std::abs(value.real()))) {
    throw Error(ErrorKind::NonRealResult, op,
                "imaginary residue " + std::to_string(value.imag()));
  }
  return value.real();
}

// Evaluates q_f(X ‖ Z; τ) for many τ with X and Z fixed.
class FactoredObjective {
 public:
  FactoredObjective(const HermMatrix &x, const HermMatrix &z, const FDivFn &f)
      : f_(f) {
    const EigDecomp ez = require_pd(z, "q_f_factored", "Z");
    z_values_ = ez.eigenvalues;
    rotated_ = ez.eigenvectors.adjoint() * sqrt_psd(x).mat();
  }

  double operator()(const HermMatrix &tau) const {
    const EigDecomp et = herm_eig(tau);
    if (!is_positive_definite(et)) {
      throw Error(ErrorKind::NotPositiveDefinite, "q_f_factored",
                  "tau is not positive definite");
    }
    const CMatrix overlap = rotated_ * et.eigenvectors;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < overlap.rows(); ++i) {
      for (Eigen::Index j = 0; j < overlap.cols(); ++j) {
        const double weight = std::norm(overlap(i, j));
        if (weight != 0.0) sum += weight * f_(z_values_(i) / et.eigenvalues(j));
      }
    }
    return sum;
  }

 private:
  const FDivFn &f_;
  RVector z_values_;
  CMatrix rotated_;
};

}  // namespace

FDivFn neglog_fn() {
  return FDivFn{"neglog", [](double x) { return -std::log(x); }, true,
                ClosedFormSup::neglog};
}

FDivFn pow_fn(double t) {
  if (!(t > 0.0 && t <= 1.0)) {
    throw Error(ErrorKind::BadParameter, "pow_fn",
                "exponent must lie in (0, 1], got " + format_exponent(t));
  }
  return FDivFn{"pow_" + format_exponent(t),
                [t](double x) { return std::pow(x, -t); }, true,
                t == 1.0 ? ClosedFormSup::inverse : ClosedFormSup::none};
}

FDivFn square_fn() {
  return FDivFn{"square", [](double x) { return x * x; }, false,
                ClosedFormSup::none};
}

std::vector<FDivFn> catalog() {
  return {neglog_fn(), pow_fn(0.25), pow_fn(0.5), pow_fn(1.0), square_fn()};
}

std::vector<FDivFn> anti_monotone_catalog() {
  std::vector<FDivFn> out;
  for (FDivFn &f : catalog()) {
    if (f.anti_monotone_claim) out.push_back(std::move(f));
  }
  return out;
}

FDivFn find_fn(std::string_view name) {
  if (name == "neglog") return neglog_fn();
  if (name == "square") return square_fn();
  if (name.rfind("pow_", 0) == 0 || name.rfind("pow:", 0) == 0) {
    const std::string_view digits = name.substr(4);
    double t = 0.0;
    const auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), t);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
      throw Error(ErrorKind::BadParameter, "find_fn",
                  "cannot read exponent in '" + std::string(name) + "'");
    }
    return pow_fn(t);
  }
  throw Error(ErrorKind::BadParameter, "find_fn",
              "unknown function '" + std::string(name) +
                  "' (expected neglog, square, pow_<t>)");
}

TauCandidate TauCandidate::make(const HermMatrix &tau, double trace_budget) {
  const EigDecomp eig = herm_eig(tau);
  if (!is_positive_definite(eig)) {
    throw Error(ErrorKind::NotPositiveDefinite, "TauCandidate",
                "tau is not positive definite (min eigenvalue " +
                    std::to_string(eig.min()) + ")");
  }
  if (tau.trace() > trace_budget + 1e-12) {
    throw Error(ErrorKind::BadParameter, "TauCandidate",
                "trace " + std::to_string(tau.trace()) + " exceeds budget " +
                    std::to_string(trace_budget));
  }
  return TauCandidate{tau, trace_budget};
}

HermMatrix tau_fallback(const HermMatrix &tau) {
  const int d = tau.dim();
  const double eps = 1e-9 * d;
  return tau * (1.0 - eps) + HermMatrix::identity(d) * (eps / d);
}

double q_f_tensor(const HermMatrix &x, const HermMatrix &z,
                  const TauCandidate &tau, const FDivFn &f) {
  require_same_dim(x, z, tau, "q_f_tensor");
  require_pd(z, "q_f_tensor", "Z");
  const int d = x.dim();
  const CVector phi =
      kron(sqrt_psd(x).mat(), CMatrix::Identity(d, d)) * gamma_vec(d);
  const HermMatrix generator(kron(inv_pd(tau.matrix).mat(), z.mat().transpose()));
  const HermMatrix fk = matrix_fn(generator, f);
  return real_part_checked(phi.dot(fk.mat() * phi), "q_f_tensor");
}

double q_f_modular(const HermMatrix &x, const HermMatrix &z,
                   const TauCandidate &tau, const FDivFn &f) {
  require_same_dim(x, z, tau, "q_f_modular");
  require_pd(z, "q_f_modular", "Z");
  const SuperOp fd = superop_fn(rel_modular(z, tau.matrix), f);
  const CVector v = vec(sqrt_psd(x).mat());
  return real_part_checked(v.dot(fd.matrix * v), "q_f_modular");
}

double q_f_factored(const HermMatrix &x, const HermMatrix &z,
                    const TauCandidate &tau, const FDivFn &f) {
  require_same_dim(x, z, tau, "q_f_factored");
  return FactoredObjective(x, z, f)(tau.matrix);
}

HermMatrix regularize_target(const HermMatrix &y, double eps) {
  if (!(eps > 0.0)) {
    throw Error(ErrorKind::BadParameter, "regularize_target", "eps must be > 0");
  }
  return y + kernel_projector(y) * eps;
}

HermMatrix tau_from_params(const std::vector<double> &theta, int d,
                           double floor) {
  const std::size_t n = static_cast<std::size_t>(d) * d;
  if (theta.size() != 2 * n) {
    throw Error(ErrorKind::DimMismatch, "tau_from_params",
                "expected 2d^2 parameters");
  }
  CMatrix g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * d + j;
      g(i, j) = Complex(theta[k], theta[n + k]);
    }
  }
  CMatrix gg = g * g.adjoint();
  const double tr = gg.trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr)) gg = CMatrix::Identity(d, d) / double(d);
  else gg /= tr;
  return hermitian_part((1.0 - floor) * gg +
                        (floor / d) * CMatrix::Identity(d, d));
}

std::optional<double> closed_form_sup(const HermMatrix &x, const HermMatrix &y,
                                      const FDivFn &f) {
  if (!is_positive_definite(herm_eig(y))) return std::nullopt;
  switch (f.closed_form_sup) {
    case ClosedFormSup::none:
      return std::nullopt;
    case ClosedFormSup::inverse: {
      const HermMatrix xh = sqrt_psd(x);
      return herm_eig(hermitian_part(xh.mat() * inv_pd(y).mat() * xh.mat())).max();
    }
    case ClosedFormSup::neglog: {
      const double tr = x.trace();
      const double x_log_x =
          spectral_map(x, [](double v) { return v > 0.0 ? v * std::log(v) : 0.0; })
              .trace();
      const double x_log_y =
          (x.mat() * matrix_fn(y, [](double v) { return std::log(v); }).mat())
              .trace()
              .real();
      return x_log_x - x_log_y - tr * std::log(tr);
    }
  }
  return std::nullopt;
}

OptResult q_f_optimized(const HermMatrix &x, const HermMatrix &y,
                        const FDivFn &f, const OptimizerConfig &cfg) {
  if (x.dim() != y.dim()) {
    throw Error(ErrorKind::DimMismatch, "q_f_optimized", "X and Y differ");
  }
  if (x.norm() == 0.0) {
    throw Error(ErrorKind::BadParameter, "q_f_optimized", "X must be nonzero");
  }
  if (!f.anti_monotone_claim && !cfg.force) {
    throw Error(ErrorKind::NotAntiMonotone, "q_f_optimized",
                f.name + " is not flagged operator anti-monotone");
  }
  if (cfg.restarts < 1 || cfg.max_evals < 1) {
    throw Error(ErrorKind::BadParameter, "q_f_optimized",
                "restarts and max_evals must be positive");
  }
  const int d = x.dim();
  const std::size_t nparams = 2 * static_cast<std::size_t>(d) * d;

  const bool singular = kernel_projector(y).trace() > 0.5;
  std::vector<double> eps_values;
  if (!singular) eps_values = {0.0};
  else if (cfg.fixed_eps) eps_values = {*cfg.fixed_eps};
  else eps_values = cfg.eps_ladder;

  struct RestartOutcome {
    double value;
    std::vector<double> theta;
    int evals;
  };

  OptResult best{-HUGE_VAL, TauCandidate{HermMatrix::identity(d), 1.0}, 0.0,
                 cfg.restarts, false, 0.0, 0, {}, true, std::nullopt};
  double best_consensus_gap = HUGE_VAL;

  for (std::size_t k = 0; k < eps_values.size(); ++k) {
    const double eps = eps_values[k];
    const HermMatrix target = eps > 0.0 ? regularize_target(y, eps) : y;
    const FactoredObjective objective(x, target, f);

    std::vector<RestartOutcome> outcomes(cfg.restarts);
    parallel_for(cfg.restarts, cfg.threads, [&](std::size_t r) {
      std::vector<double> theta0(nparams, 0.0);
      if (r == 0) {
        for (int i = 0; i < d; ++i) theta0[static_cast<std::size_t>(i) * d + i] = 1.0;
      } else {
        Rng rng = make_rng(cfg.seed, "q_f_optimized", k * 1000 + r);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (double &t : theta0) t = normal(rng);
      }
      NelderMeadOptions options;
      options.max_evals = cfg.max_evals;
      const NelderMeadResult nm = nelder_mead_minimize(
          [&](const std::vector<double> &theta) {
            return -objective(tau_from_params(theta, d, cfg.tau_floor));
          },
          theta0, options);
      outcomes[r] = RestartOutcome{-nm.fx, nm.x, nm.evals};
    });

    std::size_t winner = 0;
    for (std::size_t r = 1; r < outcomes.size(); ++r) {
      if (outcomes[r].value > outcomes[winner].value) winner = r;
    }
    double runner_up = -HUGE_VAL;
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
      if (r != winner) runner_up = std::max(runner_up, outcomes[r].value);
      best.evaluations += outcomes[r].evals;
    }
    const double value = outcomes[winner].value;
    if (!std::isfinite(value)) {
      throw Error(ErrorKind::OptimizerDiverged, "q_f_optimized",
                  "non-finite objective at eps = " + std::to_string(eps));
    }
    best.ladder.push_back(LadderStep{eps, value});
    if (value > best.value) {
      best.value = value;
      best.epsilon_used = eps;
      best.tau_star = TauCandidate::make(
          tau_from_params(outcomes[winner].theta, d, cfg.tau_floor), 1.0);
      best_consensus_gap = outcomes.size() > 1
                               ? (value - runner_up) / (1.0 + std::abs(value))
                               : 0.0;
    }
  }

  for (std::size_t k = 1; k < best.ladder.size(); ++k) {
    const double prev = best.ladder[k - 1].value;
    const double cur = best.ladder[k].value;
    if (cur < prev - cfg.opt_tol * (1.0 + std::abs(prev))) best.ladder_monotone = false;
  }
  best.trace_at_opt = best.tau_star.matrix.trace();
  if (!singular) best.closed_form = closed_form_sup(x, y, f);
  if (best.closed_form) {
    best.converged = std::abs(best.value - *best.closed_form) <=
                     cfg.opt_tol * (1.0 + std::abs(*best.closed_form));
  } else {
    best.converged = best_consensus_gap <= cfg.opt_tol;
  }
  return best;
}

}  // namespace qfdiv
