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
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string kCli = QFDIV_CLI;
const std::string kFixtures = QFDIV_FIXTURE_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / ("qfdiv_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Run run(const std::string &args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / "qfdiv_cli_io";
  fs::create_directories(dir);
  const fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = dir / ("err" + std::to_string(counter++) + ".txt");
  const std::string cmd = kCli + " " + args + " > " + out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

void write(const fs::path &p, const std::string &text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("compute") {
  const Run r = run("compute --instance " + kFixtures + "/diagonal.json --json");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["value"].get<double>() == doctest::Approx(0.14384103622589045).epsilon(1e-12));
  CHECK(j["path_tensor"].get<double>() ==
        doctest::Approx(j["path_modular"].get<double>()).epsilon(1e-12));
  CHECK(j["epsilon_used"] == 0.0);
  CHECK(j["tau_trace"].get<double>() == doctest::Approx(1.0));

  const Run opt = run("compute --instance " + kFixtures + "/diagonal.json --optimize --f pow_1 --json");
  REQUIRE(opt.code == 0);
  CHECK(json::parse(opt.out)["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));

  const Run plain = run("compute --instance " + kFixtures + "/diagonal.json");
  CHECK(plain.code == 0);
  CHECK(plain.out.find("value = ") != std::string::npos);
}

TEST_CASE("compute errors map to exit codes") {
  const Run bad = run("compute --instance " + kFixtures + "/malformed.json");
  CHECK(bad.code == 2);
  CHECK(bad.err.find("byte") != std::string::npos);

  const fs::path dir = scratch("compute");
  json inst = json::parse(slurp(kFixtures + "/diagonal.json"));
  inst["X"][1][0] = json::array({0.5});
  write(dir / "bad_entry.json", inst.dump());
  const Run path = run("compute --instance " + (dir / "bad_entry.json").string());
  CHECK(path.code == 2);
  CHECK(path.err.find("$.X[1][0]") != std::string::npos);

  // a singular tau is a numeric precondition, and the message names the operation
  write(dir / "tau.json", "[[[1,0],[0,0]],[[0,0],[0,0]]]");
  const Run singular = run("compute --instance " + kFixtures + "/diagonal.json --tau " +
                           (dir / "tau.json").string());
  CHECK(singular.code == 3);
  CHECK(singular.err.find("TauCandidate") != std::string::npos);

  CHECK(run("compute --instance " + kFixtures + "/diagonal.json --optimize --f square").code == 2);
  CHECK(run("compute --instance " + kFixtures + "/diagonal.json --eps nope").code == 2);
  CHECK(run("compute").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("zoo") {
  const Run list = run("zoo list");
  CHECK(list.code == 0);
  CHECK(list.out.find("transpose") != std::string::npos);
  const Run dep = run("zoo describe depolarizing");
  CHECK(dep.code == 0);
  CHECK(dep.out.find("[0,1]") != std::string::npos);
  CHECK(run("zoo describe teleport").code == 2);
}

TEST_CASE("verify") {
  const fs::path dir = scratch("verify");
  const Run t = run("verify --suite schwarz --channel transpose --trials 50 --out " + (dir / "t").string());
  CHECK(t.code == 0);
  CHECK(t.out.find("non-gating") != std::string::npos);
  const json report = json::parse(slurp(dir / "t" / "schwarz.json"));
  CHECK(report["verdict"] == "fail");
  CHECK(report["gating"] == false);

  const Run zero = run("verify --suite lemma --trials 0 --out " + (dir / "z").string());
  CHECK(zero.code == 0);
  CHECK(zero.err.find("warning") != std::string::npos);
  CHECK(json::parse(slurp(dir / "z" / "lemma.json"))["verdict"] == "inconclusive");

  const std::string common = "verify --suite dpi --trials 10 --seed 9 --out ";
  CHECK(run(common + (dir / "a").string() + " --threads 1").code == 0);
  CHECK(run(common + (dir / "b").string() + " --threads 4").code == 0);
  CHECK(run(common + (dir / "c").string() + " --threads 1").code == 0);
  for (const char *name : {"dpi_petz.json", "dpi_optimized.json"}) {
    CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
    CHECK(slurp(dir / "a" / name) == slurp(dir / "c" / name));
  }

  const Run replay = run("replay " + (dir / "a" / "dpi_petz.json").string());
  CHECK(replay.code == 0);
  CHECK(json::parse(replay.out)["matches"] == true);

  CHECK(run("verify --suite nope").code == 2);
  CHECK(run("verify --dim 7 --out " + (dir / "x").string()).code == 2);
  CHECK(run("verify --channel depolarizing:3 --out " + (dir / "x").string()).code == 2);
}

TEST_CASE("falsify") {
  const fs::path dir = scratch("falsify");
  const Run t = run("falsify --family transpose --budget 100 --out " + dir.string());
  CHECK(t.code == 0);
  const json report = json::parse(t.out);
  CHECK(report["verdict"] == "fail");
  REQUIRE(report.contains("fixture"));
  CHECK(fs::exists(report["fixture"].get<std::string>()));

  const Run ok = run("falsify --family depolarizing --budget 50 --out " + dir.string());
  CHECK(ok.code == 0);
  CHECK(json::parse(ok.out)["verdict"] == "pass");

  const Run none = run("falsify --family random_cptp --budget 0 --out " + dir.string());
  CHECK(none.code == 0);
  CHECK(json::parse(none.out)["verdict"] == "inconclusive");

  CHECK(run("falsify --family teleport --budget 3 --out " + dir.string()).code == 2);
}
