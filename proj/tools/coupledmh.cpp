// Copyright 2026 The coupledmh Authors
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

// coupledmh: run validation suites and coupled-chain experiments.
//
//   coupledmh validate [--config PATH] [--seed U64]
//   coupledmh experiment {expo|gaussian|trace} [--config PATH] [--seed U64]
//                        [--out DIR] [--threads N]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "coupledmh/errors.hpp"
#include "coupledmh/experiments.hpp"
#include "coupledmh/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace coupledmh;

namespace {

constexpr int kExitFailedCheck = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitIoError = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const char* where) {
  for (const auto& [key, _] : j.items())
    if (!allowed.contains(key)) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

std::vector<CouplingChoice> read_couplings(const json& j) {
  std::vector<std::string> names;
  read(j, "couplings", names);
  if (names.empty()) return all_coupling_choices();
  std::vector<CouplingChoice> out;
  for (const std::string& n : names) {
    try {
      out.push_back(parse_coupling_choice(n));
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

struct ProposalParams {
  double kappa = 3.0;
  double sigma2 = 3.0;
  double ell = 2.38;
};

void read_proposal(const json& j, ProposalParams& p) {
  if (!j.contains("proposal")) return;
  const json& q = j.at("proposal");
  if (!q.is_object()) throw ConfigError("'proposal' must be an object");
  reject_unknown_keys(q, {"kappa", "sigma2", "ell"}, "proposal");
  read(q, "kappa", p.kappa);
  read(q, "sigma2", p.sigma2);
  read(q, "ell", p.ell);
}

void read_run(const json& j, ReplicationOptions& run) {
  read(j, "replications", run.replications);
  read(j, "max_iterations", run.max_iterations);
  read(j, "seed", run.base_seed);
  if (j.contains("init")) {
    const json& init = j.at("init");
    if (init.is_string() && init.get<std::string>() == "target") return;
    if (!init.is_object() || !init.contains("x0") || !init.contains("y0"))
      throw ConfigError("'init' must be \"target\" or {\"x0\": [...], \"y0\": [...]}");
    std::vector<double> x0, y0;
    read(init, "x0", x0);
    read(init, "y0", y0);
    run.x0 = Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
    run.y0 = Eigen::Map<const Eigen::VectorXd>(y0.data(), static_cast<Eigen::Index>(y0.size()));
  }
  if (run.replications < 1 || run.max_iterations < 1)
    throw ConfigError("replications and max_iterations must be >= 1");
}

int resolve_threads(int cli_threads) {
  if (cli_threads > 0) return cli_threads;
  if (const char* env = std::getenv("COUPLEDMH_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

json tally(const std::vector<MeetingSummary>& rows) {
  json capped = json::object(), failed = json::object();
  for (const MeetingSummary& r : rows) {
    const std::string key = r.coupling + "@d=" + std::to_string(r.dim);
    capped[key] = r.capped;
    failed[key] = r.failed;
  }
  return {{"capped", capped}, {"failed", failed}};
}

void write_outputs(const fs::path& dir, const std::string& name, const std::string& csv,
                   json manifest) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::ios_base::failure("cannot create output directory " + dir.string());
  const fs::path csv_path = dir / (name + ".csv");
  const fs::path manifest_path = dir / (name + ".manifest.json");
  manifest["csv"] = csv_path.filename().string();
  {
    std::ofstream out(csv_path, std::ios::binary);
    out << csv;
    if (!out) throw std::ios_base::failure("cannot write " + csv_path.string());
  }
  std::ofstream out(manifest_path, std::ios::binary);
  out << manifest.dump(2) << '\n';
  if (!out) throw std::ios_base::failure("cannot write " + manifest_path.string());
  std::cout << "wrote " << csv_path.string() << " and " << manifest_path.string() << '\n';
}

json base_manifest(const std::string& command, const json& config, std::uint64_t seed,
                   int threads) {
  return {{"command", command},
          {"version", COUPLEDMH_VERSION},
          {"config", config},
          {"base_seed", seed},
          {"threads", threads},
          {"started_at", utc_timestamp()},
          {"cap_policy",
           "replications reaching max_iterations without meeting are excluded from mean_tau "
           "and counted in the capped column; replications whose coupling raised an error are "
           "counted under errors.failed"}};
}

int cmd_validate(const std::string& config_path, std::optional<std::uint64_t> seed) {
  ValidationConfig cfg;
  const json j = load_config(config_path);
  reject_unknown_keys(j, {"target", "proposal", "acceptance", "couplings", "pairs", "draws", "seed",
                          "ks_alpha"},
                      "validate config");
  read(j, "target", cfg.target);
  if (cfg.target != "normal" && cfg.target != "exponential")
    throw ConfigError("target must be \"normal\" or \"exponential\"");
  ProposalParams p{3.0, cfg.target == "normal" ? 10.0 : 3.0, 2.38};
  read_proposal(j, p);
  cfg.kappa = p.kappa;
  cfg.sigma2 = p.sigma2;
  if (j.contains("acceptance")) {
    const json& a = j.at("acceptance");
    if (a == "mh") {
      cfg.acceptance = AcceptanceRule::metropolis_hastings();
    } else if (a == "barker") {
      cfg.acceptance = AcceptanceRule::barker();
      cfg.acceptance_name = "barker";
    } else if (a.is_object() && a.contains("constant") && a.at("constant").is_number()) {
      const double c = a.at("constant").get<double>();
      if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("acceptance constant must lie in [0, 1]");
      cfg.acceptance = AcceptanceRule::constant(c);
      cfg.acceptance_name = "constant";
    } else {
      throw ConfigError("acceptance must be \"mh\", \"barker\" or {\"constant\": p}");
    }
  }
  cfg.couplings = read_couplings(j);
  std::vector<std::array<double, 2>> pairs;
  read(j, "pairs", pairs);
  if (!pairs.empty()) {
    cfg.pairs.clear();
    for (auto [x, y] : pairs) cfg.pairs.emplace_back(x, y);
  }
  read(j, "draws", cfg.draws);
  read(j, "seed", cfg.seed);
  read(j, "ks_alpha", cfg.ks_alpha);
  if (seed) cfg.seed = *seed;
  if (cfg.draws < 2) throw ConfigError("draws must be >= 2");

  std::vector<CheckResult> results;
  try {
    results = run_validation(cfg);
  } catch (const Error& e) {
    std::cerr << "validation aborted: " << e.what() << '\n';
    return kExitFailedCheck;
  }

  std::printf("%-13s %-7s %7s %7s %12s %12s %12s  %s\n", "check", "coupling", "x", "y", "observed",
              "expected", "tolerance", "result");
  for (const CheckResult& r : results)
    std::printf("%-13s %-7s %7.3f %7.3f %12.6f %12.6f %12.6f  %s\n", r.check.c_str(),
                r.coupling.c_str(), r.x, r.y, r.observed, r.expected, r.tolerance,
                r.pass ? "PASS" : "FAIL");
  const bool ok = all_passed(results);
  std::printf("%zu checks, %s\n", results.size(), ok ? "all passed" : "FAILURES");
  return ok ? 0 : kExitFailedCheck;
}

int cmd_experiment(const std::string& which, const std::string& config_path,
                   std::optional<std::uint64_t> seed, const std::string& out_dir, int threads) {
  const json j = load_config(config_path);
  reject_unknown_keys(j, {"proposal", "couplings", "replications", "max_iterations", "seed",
                          "dims", "dim", "horizon", "init"},
                      "experiment config");
  ProposalParams p;
  read_proposal(j, p);
  const auto started = std::chrono::steady_clock::now();
  std::ostringstream csv;
  json manifest;

  if (which == "expo") {
    ExpoConfig cfg;
    cfg.kappa = p.kappa;
    cfg.sigma2 = p.sigma2;
    cfg.couplings = read_couplings(j);
    read_run(j, cfg.run);
    if (seed) cfg.run.base_seed = *seed;
    cfg.run.threads = threads;
    const auto rows = expo_experiment(cfg);
    write_expo_csv(csv, rows);
    manifest = base_manifest("experiment expo",
                             {{"target", "exponential"},
                              {"proposal", {{"kappa", cfg.kappa}, {"sigma2", cfg.sigma2}}},
                              {"replications", cfg.run.replications},
                              {"max_iterations", cfg.run.max_iterations}},
                             cfg.run.base_seed, threads);
    manifest["errors"] = tally(rows);
  } else if (which == "gaussian") {
    GaussianConfig cfg;
    cfg.ell = p.ell;
    cfg.couplings = read_couplings(j);
    read(j, "dims", cfg.dims);
    read_run(j, cfg.run);
    if (seed) cfg.run.base_seed = *seed;
    cfg.run.threads = threads;
    for (int d : cfg.dims)
      if (d < 1) throw ConfigError("dims must be >= 1");
    const auto rows = gaussian_experiment(cfg);
    write_gaussian_csv(csv, rows);
    manifest = base_manifest("experiment gaussian",
                             {{"target", "normal"},
                              {"proposal", {{"ell", cfg.ell}}},
                              {"dims", cfg.dims},
                              {"replications", cfg.run.replications},
                              {"max_iterations", cfg.run.max_iterations}},
                             cfg.run.base_seed, threads);
    manifest["errors"] = tally(rows);
  } else {
    TraceConfig cfg;
    cfg.ell = p.ell;
    cfg.couplings = read_couplings(j);
    read(j, "dim", cfg.dim);
    read(j, "horizon", cfg.horizon);
    read_run(j, cfg.run);
    if (seed) cfg.run.base_seed = *seed;
    cfg.run.threads = threads;
    if (cfg.dim < 1 || cfg.horizon < 1) throw ConfigError("dim and horizon must be >= 1");
    const auto traces = distance_trace_experiment(cfg);
    write_trace_csv(csv, traces);
    manifest = base_manifest("experiment trace",
                             {{"target", "normal"},
                              {"proposal", {{"ell", cfg.ell}}},
                              {"dim", cfg.dim},
                              {"horizon", cfg.horizon},
                              {"replications", cfg.run.replications}},
                             cfg.run.base_seed, threads);
  }
  manifest["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_outputs(out_dir, which, csv.str(), std::move(manifest));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximal couplings of Metropolis-Hastings kernels: validation and experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  int threads = 0;

  auto* validate = app.add_subcommand("validate", "Run the one-dimensional validation suite");
  validate->add_option("--config", config_path, "JSON config");
  validate->add_option("--seed", seed, "Base seed");

  auto* experiment = app.add_subcommand("experiment", "Run a coupled-chain experiment");
  experiment->require_subcommand(1);
  for (const char* name : {"expo", "gaussian", "trace"}) {
    auto* sub = experiment->add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config");
    sub->add_option("--seed", seed, "Base seed");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--threads", threads, "Worker threads (fallback: COUPLEDMH_THREADS)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfigError;
  }

  try {
    if (*validate) return cmd_validate(config_path, seed);
    for (auto* sub : experiment->get_subcommands())
      return cmd_experiment(sub->get_name(), config_path, seed, out_dir, resolve_threads(threads));
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIoError;
  }
  return 0;
}
