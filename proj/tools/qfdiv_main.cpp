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

// qfdiv: command-line front end.
//
// Exit codes: 0 pass, 1 a gating suite failed, 2 usage or parse error,
// 3 numeric precondition.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "qfdiv/certify.hpp"
#include "qfdiv/error.hpp"
#include "qfdiv/fdiv.hpp"
#include "qfdiv/io.hpp"
#include "qfdiv/zoo.hpp"

using namespace qfdiv;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

// automatic regularization for a singular Y with a fixed τ
constexpr double kAutoEps = 1e-8;

struct ComputeArgs {
  std::string instance;
  std::optional<std::string> f;
  std::optional<std::string> tau;
  bool optimize = false;
  std::string eps = "auto";
  bool json_out = false;
  std::uint64_t seed = 0;
  int threads = 1;
  bool force = false;
};

struct VerifyArgs {
  std::string suite = "all";
  int trials = -1;
  std::uint64_t seed = 42;
  int dim = 0;
  std::optional<std::string> channel;
  std::string out = "qfdiv_reports";
  int threads = 1;
  bool timing = false;
};

struct FalsifyArgs {
  std::string family;
  int budget = 100;
  std::uint64_t seed = 42;
  std::string out = "qfdiv_reports";
  int threads = 1;
};

std::optional<double> parse_eps(const std::string &text) {
  if (text == "auto") return std::nullopt;
  std::size_t used = 0;
  double eps = 0.0;
  try {
    eps = std::stod(text, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != text.size() || !(eps > 0.0)) {
    throw Error(ErrorKind::BadParameter, "--eps", "expected a positive number or 'auto'");
  }
  return eps;
}

void print_value(const json &j, bool as_json) {
  if (as_json) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  for (const auto &[key, value] : j.items()) std::cout << key << " = " << value.dump() << "\n";
}

int cmd_compute(const ComputeArgs &a) {
  const InstanceFile file = instance_from_json(read_json_file(a.instance));
  const FDivFn f = find_fn(a.f ? *a.f : file.f.value_or("neglog"));
  const std::optional<double> fixed = parse_eps(a.eps);
  const bool y_pd = is_positive_definite(herm_eig(file.y));

  json out;
  out["f"] = f.name;
  if (a.optimize) {
    OptimizerConfig cfg;
    cfg.seed = a.seed;
    cfg.threads = a.threads;
    cfg.fixed_eps = fixed;
    cfg.force = a.force;
    const OptResult r = q_f_optimized(file.x, file.y, f, cfg);
    const HermMatrix z = r.epsilon_used > 0.0 ? regularize_target(file.y, r.epsilon_used) : file.y;
    out["mode"] = "optimize";
    out["value"] = r.value;
    out["path_tensor"] = q_f_tensor(file.x, z, r.tau_star, f);
    out["path_modular"] = q_f_modular(file.x, z, r.tau_star, f);
    out["epsilon_used"] = r.epsilon_used;
    out["tau_trace"] = r.trace_at_opt;
    out["converged"] = r.converged;
    out["restarts"] = r.restarts;
    if (r.closed_form) out["closed_form"] = *r.closed_form;
  } else {
    std::optional<HermMatrix> tau_m = file.tau;
    if (a.tau) tau_m = herm_from_json(read_json_file(*a.tau), "$");
    if (!tau_m) {
      throw Error(ErrorKind::BadParameter, "compute", "pass --tau <file> or --optimize, or put tau in the instance");
    }
    const TauCandidate tau = TauCandidate::make(*tau_m);
    double eps = 0.0;
    if (!y_pd) eps = fixed.value_or(kAutoEps);
    const HermMatrix z = eps > 0.0 ? regularize_target(file.y, eps) : file.y;
    const double tensor = q_f_tensor(file.x, z, tau, f);
    out["mode"] = "tau";
    out["value"] = tensor;
    out["path_tensor"] = tensor;
    out["path_modular"] = q_f_modular(file.x, z, tau, f);
    out["epsilon_used"] = eps;
    out["tau_trace"] = tau.matrix.trace();
  }
  print_value(out, a.json_out);
  return kExitPass;
}

int cmd_verify(const VerifyArgs &a) {
  SuiteOptions opts;
  opts.trials = a.trials;
  opts.seed = a.seed;
  opts.dim = a.dim;
  opts.channel = a.channel;
  opts.threads = a.threads;
  if (a.channel) build_map(*a.channel, a.dim > 0 ? a.dim : 2);  // fail early on bad grammar
  const std::vector<std::string> suites = expand_suite(a.suite);
  if (a.trials == 0) std::cerr << "warning: --trials 0, every suite is inconclusive\n";

  std::filesystem::create_directories(a.out);
  int code = kExitPass;
  for (const std::string &name : suites) {
    const CertReport r = run_suite(name, opts);
    const json j = report_to_json(r, a.timing);
    const std::string path = (std::filesystem::path(a.out) / (name + ".json")).string();
    std::ofstream(path) << j.dump(2) << "\n";
    std::cout << name << " " << to_string(r.verdict) << " min_margin=" << j["min_margin"].dump()
              << (r.gating ? "" : " (finding, non-gating)") << " -> " << path << "\n";
    if (r.blocks()) {
      const std::string fixture =
          write_fixture((std::filesystem::path(a.out) / "fixtures").string(), name + "_worst",
                        r.worst_case_inputs);
      std::cout << "  worst case: " << fixture << "\n";
      code = kExitFail;
    }
  }
  return code;
}

int cmd_falsify(const FalsifyArgs &a) {
  FalsifyOptions opts;
  opts.family = a.family;
  opts.budget = a.budget;
  opts.seed = a.seed;
  opts.threads = a.threads;
  opts.fixture_dir = (std::filesystem::path(a.out) / "fixtures").string();
  const CertReport r = falsify_search(opts);
  std::cout << report_to_json(r).dump(2) << "\n";
  if (r.verdict == Verdict::inconclusive) std::cerr << "warning: budget 0, search is inconclusive\n";
  return r.blocks() ? kExitFail : kExitPass;
}

int cmd_zoo_list() {
  for (const ZooInfo &z : zoo_list()) {
    std::cout << z.name << "\t" << z.grammar << "\t" << z.parameters << "\n";
  }
  return kExitPass;
}

int cmd_zoo_describe(const std::string &name) {
  const std::optional<ZooInfo> z = zoo_describe(name);
  if (!z) throw Error(ErrorKind::BadParameter, "zoo describe", "unknown map '" + name + "'");
  std::cout << "name: " << z->name << "\n"
            << "grammar: " << z->grammar << "\n"
            << "parameters: " << z->parameters << "\n"
            << "completely positive: " << (z->completely_positive ? "yes" : "no") << "\n";
  return kExitPass;
}

int cmd_replay(const std::string &path) {
  const ReplayResult r = replay(read_json_file(path));
  std::cout << json{{"recorded", r.recorded}, {"replayed", r.replayed}, {"matches", r.matches}}.dump(2)
            << "\n";
  return r.matches ? kExitPass : kExitFail;
}

int run(int argc, char **argv) {
  CLI::App app{"optimized quantum f-divergences: evaluation and certification"};
  app.require_subcommand(1);

  ComputeArgs ca;
  CLI::App *compute = app.add_subcommand("compute", "evaluate the f-divergence of an instance");
  compute->add_option("--instance", ca.instance, "instance JSON file")->required();
  compute->add_option("--f", ca.f, "neglog, square or pow_<t>");
  auto *tau_opt = compute->add_option("--tau", ca.tau, "fixed tau (matrix JSON file)");
  compute->add_flag("--optimize", ca.optimize, "maximize over tau")->excludes(tau_opt);
  compute->add_option("--eps", ca.eps, "regularization of a singular Y, or 'auto'");
  compute->add_flag("--json", ca.json_out, "print JSON");
  compute->add_option("--seed", ca.seed, "optimizer seed");
  compute->add_option("--threads", ca.threads)->check(CLI::PositiveNumber);
  compute->add_flag("--force", ca.force, "allow f outside the anti-monotone catalog");

  VerifyArgs va;
  CLI::App *verify = app.add_subcommand("verify", "run certification suites");
  verify->add_option("--suite", va.suite,
                     "lemma, chain, dpi, dpi_petz, dpi_optimized, jensen, schwarz, antimonotone, remark or all");
  verify->add_option("--trials", va.trials, "trials per suite (default: per suite)")->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", va.seed);
  verify->add_option("--dim", va.dim, "fix both dimensions (2 or 3)");
  verify->add_option("--channel", va.channel, "zoo map instead of random channels");
  verify->add_option("--out", va.out, "report directory");
  verify->add_option("--threads", va.threads)->check(CLI::PositiveNumber);
  verify->add_flag("--timing", va.timing, "include wall_time in reports");

  FalsifyArgs fa;
  CLI::App *falsify = app.add_subcommand("falsify", "search a map family for violations");
  falsify->add_option("--family", fa.family,
                      "random_cptp, transpose, transpose_cptp, depolarizing, dephasing, "
                      "amplitude_damping or a zoo grammar")
      ->required();
  falsify->add_option("--budget", fa.budget)->check(CLI::NonNegativeNumber);
  falsify->add_option("--seed", fa.seed);
  falsify->add_option("--out", fa.out, "fixtures go to <out>/fixtures");
  falsify->add_option("--threads", fa.threads)->check(CLI::PositiveNumber);

  CLI::App *zoo = app.add_subcommand("zoo", "list or describe the map zoo");
  zoo->require_subcommand(1);
  CLI::App *zoo_list_cmd = zoo->add_subcommand("list", "list maps");
  std::string describe_name;
  CLI::App *zoo_desc = zoo->add_subcommand("describe", "describe one map");
  zoo_desc->add_option("name", describe_name)->required();

  std::string replay_path;
  CLI::App *replay_cmd = app.add_subcommand("replay", "re-evaluate a report's worst case");
  replay_cmd->add_option("report", replay_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  if (compute->parsed()) return cmd_compute(ca);
  if (verify->parsed()) return cmd_verify(va);
  if (falsify->parsed()) return cmd_falsify(fa);
  if (zoo_list_cmd->parsed()) return cmd_zoo_list();
  if (zoo_desc->parsed()) return cmd_zoo_describe(describe_name);
  if (replay_cmd->parsed()) return cmd_replay(replay_path);
  return kExitUsage;
}

}  // namespace

int main(int argc, char **argv) {
  try {
    return run(argc, argv);
  } catch (const Error &e) {
    std::cerr << "error [" << to_string(e.kind()) << "] " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::ParseError:
      case ErrorKind::BadParameter:
      case ErrorKind::DimMismatch:
      case ErrorKind::NotAntiMonotone:
        return kExitUsage;
      default:
        return kExitNumeric;
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
