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

#include <string>

#include "qfdiv/certify.hpp"
#include "qfdiv/error.hpp"
#include "qfdiv/io.hpp"
#include "qfdiv/random.hpp"
#include "qfdiv/zoo.hpp"

using namespace qfdiv;

namespace {

const std::string kFixtures = QFDIV_FIXTURE_DIR;

json diagonal() { return read_json_file(kFixtures + "/diagonal.json"); }

// the JSON path of the parse error raised by fn
template <typename Fn>
std::string error_path(Fn &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    return e.op();
  }
  FAIL("no parse error");
  return "";
}

}  // namespace

TEST_CASE("matrix json") {
  Rng rng = make_rng(5, "io", 0);
  const CMatrix m = gaussian_matrix(rng, 3, 3);
  CHECK((matrix_from_json(matrix_to_json(m)) - m).norm() == 0.0);
  CHECK(matrix_to_json(CMatrix::Identity(2, 2)).dump() == "[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]");

  CHECK(error_path([] { matrix_from_json(json::parse("[[[1,0],[0,0]],[[0,0],[1]]]"), "$.X"); }) == "$.X[1][1]");
  CHECK(error_path([] { matrix_from_json(json::parse("[[[1,0],[0,0]],[[0,0]]]"), "$.X"); }) == "$.X[1]");
  CHECK(error_path([] { matrix_from_json(json::parse("{}"), "$.X"); }) == "$.X");
  CHECK(error_path([] { matrix_from_json(json::parse("[[[1,\"a\"]]]"), "$.Y"); }) == "$.Y[0][0]");
  CHECK(error_path([] { herm_from_json(json::parse("[[[1,0],[1,0]],[[0,0],[1,0]]]"), "$.X"); }) == "$.X");
}

TEST_CASE("instance parsing reports the offending path") {
  const InstanceFile ok = instance_from_json(diagonal());
  CHECK(ok.dim_a == 2);
  CHECK(ok.dim_b == 2);
  CHECK(ok.tau.has_value());
  CHECK(*ok.f == "neglog");

  auto broken = [](const std::string &pointer, const json &value) {
    json j = diagonal();
    if (value.is_null()) {
      j.erase(pointer);
    } else {
      j[json::json_pointer(pointer)] = value;
    }
    return error_path([&] { instance_from_json(j); });
  };
  CHECK(broken("version", nullptr) == "$.version");
  CHECK(broken("/version", 2) == "$.version");
  CHECK(broken("X", nullptr) == "$.X");
  CHECK(broken("/X/1/0", json::parse("[0.5]")) == "$.X[1][0]");
  CHECK(broken("/X/0/0", json::parse("[-1.0, 0.0]")) == "$.X");
  CHECK(broken("/Y", json::parse("[[[1,0]]]")) == "$.Y");
  CHECK(broken("/dims/A", 3) == "$.dims.A");
  CHECK(broken("/dims/B", 3) == "$.channel");
  CHECK(broken("/channel", "depolarizing:7") == "$.channel");
  CHECK(broken("/channel", "random_cptp:3:2:1") == "$.channel");
  CHECK(broken("/channel", json::parse("{\"kraus\": [[[[1, 0]]]]}")) == "$.channel");
  CHECK(broken("/omega/0/0", json::parse("[0.9, 0.0]")) == "$.omega");
  CHECK(broken("/omega/0/0", json::parse("[0.0, 0.0]")) == "$.omega");
  CHECK(broken("/tau", json::parse("[[[1,0]]]")) == "$.tau");
  CHECK(broken("/f", "pow_3") == "$.f");
  CHECK(broken("/f", 4) == "$.f");

  const std::string bad = error_path([] { read_json_file(kFixtures + "/malformed.json"); });
  CHECK(bad == "$");
  try {
    read_json_file(kFixtures + "/malformed.json");
  } catch (const Error &e) {
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
}

TEST_CASE("instance round trip is idempotent") {
  Rng rng = make_rng(6, "io", 0);
  for (int trial = 0; trial < 20; ++trial) {
    MapSpec phi = trial % 2 ? build_map("random_cptp:3x2:2:" + std::to_string(trial))
                            : MapSpec::from_kraus({random_unitary(rng, 3)});
    const TauCandidate omega = TauCandidate::make(random_density(rng, phi.dim_out));
    const Instance inst = Instance::make(random_density(rng, 3), random_psd(rng, 3),
                                         std::move(phi), omega, pow_fn(0.25));
    const std::string once = instance_json(inst).dump(2);
    const std::string twice = instance_to_json(instance_from_json(json::parse(once))).dump(2);
    CHECK(once == twice);
  }
  const std::string first = instance_to_json(instance_from_json(diagonal())).dump();
  const std::string second = instance_to_json(instance_from_json(json::parse(first))).dump();
  CHECK(first == second);
}

TEST_CASE("map json") {
  Rng rng = make_rng(7, "io", 0);
  const MapSpec k = random_cptp(2, 3, 2, 4);
  const MapSpec k2 = map_from_json(map_to_json(k), 2);
  CHECK((choi_matrix(k2) - choi_matrix(k)).norm() == 0.0);

  const MapSpec c = MapSpec::from_choi(choi_matrix(k), 2, 3);
  const json cj = map_to_json(c);
  CHECK(cj.contains("choi"));
  CHECK((choi_matrix(map_from_json(cj, 2)) - choi_matrix(k)).norm() == 0.0);

  CHECK(map_to_json(build_map("transpose", 3)) == "transpose");
  const MapSpec adj = adjoint_map(build_map("amplitude_damping:0.4"));
  CHECK(map_to_json(adj).is_object());

  const MapSpec h = map_from_json("unitary:" + kFixtures + "/hadamard.json", 2);
  CHECK(h.trace_preserving);
  CHECK((apply_map(h, CMatrix::Identity(2, 2)) - CMatrix::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("transpose fixture replays") {
  const json fixture = read_json_file(kFixtures + "/transpose_schwarz.json");
  CHECK(evaluate_inputs(fixture) == doctest::Approx(fixture["margin"].get<double>()).epsilon(1e-12));
  const MapSpec t = build_map("transpose", 2);
  CHECK(schwarz_margin(t, matrix_from_json(fixture["rho"]), herm_from_json(fixture["sigma"])) ==
        doctest::Approx(-1.0).epsilon(1e-12));
}
