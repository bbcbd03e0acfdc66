// ladapt: run experiments, compare them, and run the invariant suites.

#include <cstdint>
#include <exception>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "ladapt/harness/config.hpp"
#include "ladapt/harness/experiment.hpp"
#include "ladapt/harness/output.hpp"
#include "ladapt/verify/suites.hpp"

namespace {

using namespace ladapt::harness;

std::string optional_cell(const std::optional<double>& v, const char* spec = "{:.4g}") {
  return v ? fmt::format(fmt::runtime(spec), *v) : std::string("-");
}

void print_summary(const ExperimentTrace& trace) {
  const ExperimentSummary& s = trace.summary;
  fmt::print("{}: {} on {} (T={}, seed {})\n", trace.config.name, trace.algorithm_name,
             to_string(trace.config.environment.kind), trace.config.environment.horizon,
             trace.config.environment.seed);
  fmt::print("  comparator     {}\n", s.comparator);
  fmt::print("  regret         {:.6g}\n", s.regret);
  fmt::print("  pseudo-regret  {:.6g}\n", s.pseudo_regret);
  fmt::print("  bound          {}\n", optional_cell(s.bound, "{:.6g}"));
  fmt::print("  min slack      {}{}\n", optional_cell(s.min_slack, "{:.6g}"),
             s.bound_clamped ? "  (ln ln term clamped at e)" : "");
  fmt::print("  violations     {}\n", s.bound_violations);
  fmt::print("  restarts       {}\n", s.restarts);
  for (const CheckpointRegret& c : s.checkpoints) {
    fmt::print("  regret@{:<7} {:.6g}\n", c.round, c.regret);
  }
  if (s.invariant_checks > 0) {
    fmt::print("  invariants     {} checked, {} violated\n", s.invariant_checks,
               s.invariant_violation_count);
    for (const std::string& v : s.invariant_violations) fmt::print("    {}\n", v);
  }
  fmt::print("  wall time      {:.3f}s\n", s.wall_seconds);
}

int run_command(const std::string& config_path, const std::string& out,
                bool verify, const std::optional<std::uint64_t>& seed) {
  ExperimentConfig config = load_config(config_path);
  if (seed) config.environment.seed = *seed;
  const ExperimentTrace trace = run_experiment(config, verify);
  const OutputPaths paths = write_outputs(trace, out);
  print_summary(trace);
  fmt::print("  wrote          {}\n                 {}\n", paths.csv.string(), paths.summary.string());
  const bool failed = trace.summary.bound_violations > 0 ||
                      trace.summary.invariant_violation_count > 0;
  return failed ? 1 : 0;
}

int compare_command(const std::vector<std::string>& paths, const std::string& out, bool verify,
                    bool as_json) {
  std::vector<std::future<ExperimentTrace>> jobs;
  for (const std::string& p : paths) {
    ExperimentConfig config = load_config(p);
    jobs.push_back(std::async(std::launch::async, [config, verify] {
      return run_experiment(config, verify);
    }));
  }
  std::vector<ExperimentTrace> traces;
  for (auto& job : jobs) traces.push_back(job.get());
  if (!out.empty()) {
    for (const ExperimentTrace& t : traces) write_outputs(t, out);
  }

  bool failed = false;
  if (as_json) {
    nlohmann::json all = nlohmann::json::array();
    for (const ExperimentTrace& t : traces) all.push_back(nlohmann::json::parse(summary_json(t)));
    std::cout << all.dump(2) << "\n";
  } else {
    fmt::print("{:<32} {:<20} {:>7} {:>12} {:>12} {:>12} {:>9} {:>8}\n", "config", "algorithm",
               "T", "regret", "bound", "min slack", "restarts", "seconds");
  }
  for (const ExperimentTrace& t : traces) {
    const ExperimentSummary& s = t.summary;
    failed = failed || s.bound_violations > 0 || s.invariant_violation_count > 0;
    if (as_json) continue;
    fmt::print("{:<32} {:<20} {:>7} {:>12.5g} {:>12} {:>12} {:>9} {:>8.3f}\n", t.config.name,
               t.algorithm_name, t.config.environment.horizon, s.regret, optional_cell(s.bound),
               optional_cell(s.min_slack), s.restarts, s.wall_seconds);
  }
  return failed ? 1 : 0;
}

int verify_command(const std::string& suite, std::uint64_t seed) {
  std::vector<std::string> suites;
  if (suite == "all") {
    suites = ladapt::verify::suite_names();
  } else {
    suites.push_back(suite);
  }
  bool failed = false;
  for (const std::string& name : suites) {
    for (const auto& r : ladapt::verify::run_suite(name, seed)) {
      failed = failed || !r.passed();
      fmt::print("[{}] {:<10} {:<42} {:>6} cases {:>8} checks  {:.2f}s  {}\n",
                 r.passed() ? "PASS" : "FAIL", name, r.name, r.cases, r.checks, r.seconds, r.detail);
    }
  }
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lipschitz-adaptive online learning experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  bool verify = false;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run one experiment and write its CSV trace and summary");
  run->add_option("--config", config_path, "Experiment configuration (JSON)")->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--verify", verify, "Check module invariants after every round");
  run->add_option("--seed", seed, "Override the environment seed");

  std::vector<std::string> config_paths;
  std::string compare_out;
  bool as_json = false;
  auto* compare = app.add_subcommand("compare", "Run several experiments and tabulate them");
  compare->add_option("--configs", config_paths, "Experiment configurations")->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--out", compare_out, "Also write traces into this directory");
  compare->add_flag("--verify", verify, "Check module invariants after every round");
  compare->add_flag("--json", as_json, "Print the summaries as a JSON array");

  std::string suite;
  std::uint64_t verify_seed = 2024;
  auto* check = app.add_subcommand("verify", "Run randomized invariant suites");
  check->add_option("--suite", suite, "Suite to run")
      ->required()
      ->check(CLI::IsMember({"squint", "metagrad", "projection", "restart", "all"}));
  check->add_option("--seed", verify_seed, "Seed for the random instances");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config_path, out_dir, verify, seed);
    if (*compare) return compare_command(config_paths, compare_out, verify, as_json);
    if (*check) return verify_command(suite, verify_seed);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 0;
}
