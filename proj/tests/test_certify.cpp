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
#include <filesystem>

#include "qfdiv/certify.hpp"
#include "qfdiv/error.hpp"
#include "qfdiv/random.hpp"
#include "qfdiv/zoo.hpp"

using namespace qfdiv;

namespace {

CMatrix unit(int d, int i, int j) {
  CMatrix e = CMatrix::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

Instance random_instance(Rng &rng, MapSpec phi, FDivFn f = neglog_fn()) {
  HermMatrix x = random_density(rng, phi.dim_in);
  HermMatrix y = random_density(rng, phi.dim_in);
  TauCandidate omega = TauCandidate::make(random_density(rng, phi.dim_out));
  return Instance::make(x, y, std::move(phi), omega, std::move(f));
}

SuiteOptions small(int trials, int threads = 1) {
  SuiteOptions o;
  o.trials = trials;
  o.seed = 7;
  o.threads = threads;
  return o;
}

}  // namespace

TEST_CASE("instance construction and serialization") {
  Rng rng = make_rng(1, "cert", 0);
  const MapSpec phi = build_map("random_cptp:2x3:2:11");
  const Instance inst = random_instance(rng, phi, pow_fn(0.5));
  const Instance back = instance_from_json_value(instance_json(inst));
  CHECK(back.f.name == "pow_0.5");
  CHECK((back.x.mat() - inst.x.mat()).norm() == 0.0);
  CHECK((back.omega.matrix.mat() - inst.omega.matrix.mat()).norm() == 0.0);
  CHECK((apply_map(back.phi, inst.x.mat()) - apply_map(phi, inst.x.mat())).norm() == 0.0);

  CHECK_THROWS_AS(Instance::make(inst.x, inst.y, phi, TauCandidate::make(random_density(rng, 2))),
                  Error);
  CHECK_THROWS_AS(Instance::make(random_density(rng, 3), inst.y, phi, inst.omega), Error);
}

TEST_CASE("lemma_margin") {
  Rng rng = make_rng(2, "cert", 0);
  const Instance id = random_instance(rng, build_map("identity", 3));
  CHECK(std::abs(lemma_margin(id)) <= 1e-10);

  double worst = HUGE_VAL;
  for (int trial = 0; trial < 200; ++trial) {
    const int da = 2 + trial % 2;
    const int db = 2 + (trial / 2) % 2;
    const Instance inst = random_instance(rng, random_cptp(da, db, 3, 1000 + trial));
    const double scale = 1.0 + rel_modular(apply_map(inst.phi, inst.y), inst.omega.matrix).matrix.norm();
    worst = std::min(worst, lemma_margin(inst) / scale);
  }
  CHECK(worst >= -1e-9);
}

TEST_CASE("proof chain") {
  Rng rng = make_rng(3, "cert", 0);
  const Instance id = random_instance(rng, build_map("identity", 2));
  const ChainReport c = proof_chain_check(id, gaussian_matrix(rng, 2, 2));
  CHECK(std::abs(c.slack) <= 1e-10 * (1.0 + std::abs(c.bound)));

  const Instance inst = random_instance(rng, random_cptp(3, 2, 2, 5));
  const ChainReport zero = proof_chain_check(inst, CMatrix::Zero(2, 2));
  CHECK(zero.lhs == 0.0);
  CHECK(zero.middle == 0.0);
  CHECK(zero.bound == 0.0);
  CHECK(zero.rhs == 0.0);

  for (int k = 0; k < 50; ++k) {
    const ChainReport r = proof_chain_check(inst, gaussian_matrix(rng, 2, 2));
    CHECK(r.first_equality_error <= 1e-10);
    CHECK(r.last_equality_error <= 1e-10);
    CHECK(r.slack >= -1e-9 * (1.0 + std::abs(r.bound)));
    CHECK(r.schwarz >= -1e-9 * (1.0 + std::abs(r.bound)));
  }
  CHECK_THROWS_AS(proof_chain_check(inst, CMatrix::Zero(3, 3)), Error);
}

TEST_CASE("dpi_check") {
  Rng rng = make_rng(4, "cert", 0);
  // invertible channel: equality in optimized mode
  const MapSpec u = MapSpec::from_kraus({random_unitary(rng, 2)});
  const CertReport eq = dpi_check(random_instance(rng, u), DpiMode::optimized);
  CHECK(eq.verdict == Verdict::pass);
  CHECK(std::abs(eq.min_margin) <= 1e-6);

  // X = Y, f = -log, tr X = 1: both sides vanish
  const MapSpec phi = random_cptp(2, 2, 2, 3);
  const HermMatrix x = random_density(rng, 2);
  const Instance same = Instance::make(x, x, phi, TauCandidate::make(random_density(rng, 2)));
  const DpiSides s = dpi_sides(same, DpiMode::optimized);
  CHECK(std::abs(s.lhs) <= 1e-6);
  CHECK(std::abs(s.rhs) <= 1e-6);
  CHECK(std::abs(s.margin) <= 1e-6);

  for (int trial = 0; trial < 50; ++trial) {
    Instance inst = random_instance(rng, random_cptp(2 + trial % 2, 2 + (trial / 2) % 2, 2, 40 + trial));
    for (const FDivFn &f : anti_monotone_catalog()) {
      inst.f = f;
      const CertReport r = dpi_check(inst, DpiMode::petz);
      CHECK(r.verdict == Verdict::pass);
      CHECK(replay(report_to_json(r)).matches);
    }
  }

  // singular Y is regularized on both sides
  RVector v(2);
  v << 1.0, 0.0;
  const Instance singular = Instance::make(x, HermMatrix::diagonal(v), phi, TauCandidate::make(random_density(rng, 2)));
  CHECK(dpi_check(singular, DpiMode::petz).verdict == Verdict::pass);
}

TEST_CASE("anti_monotone_check") {
  CHECK(anti_monotone_check(neglog_fn(), 3, 200, 5).verdict == Verdict::pass);
  CHECK(anti_monotone_check(pow_fn(1.0), 4, 200, 5).verdict == Verdict::pass);
  const CertReport sq = anti_monotone_check(square_fn(), 2, 200, 5);
  CHECK(sq.verdict == Verdict::fail);
  CHECK_FALSE(sq.gating);
  CHECK(sq.worst_case_inputs["f"] == "square");
  const ReplayResult rp = replay(report_to_json(sq));
  CHECK(rp.matches);
  CHECK(rp.replayed < -1e-9);
  CHECK_THROWS_AS(anti_monotone_check(neglog_fn(), 5, 1, 1), Error);
}

TEST_CASE("schwarz suite and channel experiments") {
  const CertReport r = run_suite("schwarz", small(300));
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.gating);

  SuiteOptions o = small(100);
  o.channel = "transpose";
  const CertReport t = run_suite("schwarz", o);
  CHECK(t.verdict == Verdict::fail);
  CHECK_FALSE(t.gating);
  CHECK_FALSE(t.blocks());
  CHECK(t.note.find("experiment") != std::string::npos);

  o.channel = "depolarizing:0.3";
  o.dim = 3;
  CHECK(run_suite("schwarz", o).gating);
}

TEST_CASE("jensen: quadratic form holds, operator form does not") {
  const CertReport r = run_suite("jensen", small(100));
  CHECK(r.verdict == Verdict::pass);
  REQUIRE(r.metrics.size() == 1);
  // the operator inequality for a contraction needs f(0) <= 0; -log and
  // x^{-t} violate it, and sampling finds that immediately
  CHECK(r.metrics[0].value < -1e-3);
  CHECK_FALSE(r.metrics[0].gating);
}

TEST_CASE("remark_experiment") {
  const CertReport r = remark_experiment(50, 3);
  CHECK_FALSE(r.gating);
  CHECK(r.verdict == Verdict::fail);
  auto metric = [&](const std::string &name) {
    for (const Metric &m : r.metrics) {
      if (m.name == name) return m.value;
    }
    FAIL("missing metric " << name);
    return 0.0;
  };
  CHECK(metric("fixture_schwarz_margin") == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(metric("transpose_choi_min_eig") == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(std::abs(metric("hermitian_real_sigma_min")) <= 1e-10);
  CHECK(std::abs(metric("dpi_optimized_transpose_d2")) <= 1e-6);
  CHECK(replay(report_to_json(r)).matches);
  CHECK(remark_experiment(0, 3).verdict == Verdict::inconclusive);
}

TEST_CASE("falsify_search") {
  const std::string dir = (std::filesystem::temp_directory_path() / "qfdiv_falsify_test").string();
  std::filesystem::remove_all(dir);

  FalsifyOptions none{"random_cptp", 0, 1, 1, dir};
  CHECK(falsify_search(none).verdict == Verdict::inconclusive);

  FalsifyOptions t{"transpose", 100, 1, 1, dir};
  const CertReport found = falsify_search(t);
  CHECK(found.verdict == Verdict::fail);
  CHECK_FALSE(found.gating);
  REQUIRE(found.fixture.has_value());
  CHECK(std::filesystem::exists(*found.fixture));
  REQUIRE(found.shrunk.has_value());
  const double shrunk = (*found.shrunk)["margin"].get<double>();
  CHECK(shrunk < -1e-9);
  CHECK(evaluate_inputs(*found.shrunk) == shrunk);

  FalsifyOptions cptp{"random_cptp", 1000, 1, 2, dir};
  const CertReport ok = falsify_search(cptp);
  CHECK(ok.verdict == Verdict::pass);
  CHECK(ok.gating);
  CHECK_FALSE(ok.fixture.has_value());
}

TEST_CASE("every suite replays and is thread independent") {
  for (const std::string &name : suite_names()) {
    CAPTURE(name);
    const int trials = name == "dpi_optimized" ? 4 : 20;
    const CertReport one = run_suite(name, small(trials, 1));
    const CertReport four = run_suite(name, small(trials, 4));
    CHECK(report_to_json(one).dump() == report_to_json(four).dump());
    CHECK(report_to_json(one).dump() == report_to_json(run_suite(name, small(trials, 1))).dump());
    const ReplayResult rp = replay(report_to_json(one));
    CHECK(rp.matches);
    if (name != "remark") CHECK(one.verdict == Verdict::pass);
  }
  CHECK(run_suite("lemma", small(0)).verdict == Verdict::inconclusive);
  CHECK(expand_suite("dpi").size() == 2);
  CHECK(expand_suite("all").size() == suite_names().size());
  CHECK_THROWS_AS(expand_suite("nope"), Error);
  CHECK_FALSE(report_to_json(run_suite("lemma", small(1))).contains("wall_time"));
  CHECK(report_to_json(run_suite("lemma", small(1)), true).contains("wall_time"));
}
