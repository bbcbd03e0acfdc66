#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ladapt/domain.hpp"
#include "ladapt/harness/environment.hpp"
#include "ladapt/restart.hpp"
#include "ladapt/types.hpp"

namespace ladapt::harness {

enum class AlgorithmKind {
  squint_c,
  squint_l,
  hedge,
  metagrad_c,
  metagrad_l,
  metagrad_c_reduced,
  metagrad_l_reduced,
  ogd_adanorm,
};

std::string to_string(AlgorithmKind kind);
AlgorithmKind algorithm_kind_from_string(const std::string& name);
Setting setting_of(AlgorithmKind kind);

struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::squint_l;
  double initial_scale = 1.0;  // B for the +c variants
  double range_scale = 1.0;    // hedge: assumed range = true range * range_scale
};

struct ExperimentConfig {
  std::string name = "experiment";
  EnvironmentSpec environment;
  AlgorithmSpec algorithm;
  // Rounds at which the regret against that prefix's own best comparator is
  // reported.
  std::vector<std::size_t> checkpoints;
  // A row violates its bound when slack < -slack_tolerance * max(1, bound).
  double slack_tolerance = 1e-9;
  bool track_potential = true;

  // Also rejects an expert algorithm on a convex-loss stream and vice versa.
  void validate() const;
};

struct RoundRecord {
  std::size_t t = 0;
  double magnitude = 0.0;   // b_t
  double running_max = 0.0; // B_t
  std::optional<std::size_t> active_slaves;
  std::optional<double> potential;
  bool restart = false;
  std::optional<double> regret_best;
  std::optional<double> bound;
  std::optional<double> slack;
};

// Scale statistics after a round, as needed by the bound of the algorithm.
struct BoundInputs {
  double initial_scale = 0.0;
  double previous_max = 0.0;
  double current_max = 0.0;
  double squared_sum_before = 0.0;
  double squared_sum = 0.0;
  double ratio_sum_before = 0.0;
  double squared_ratio_sum = 0.0;
  double squared_cumulative_ratio_sum = 0.0;
  double direct_bound = 0.0;  // baselines: comparator-free bound
};

struct CheckpointRegret {
  std::size_t round = 0;
  double regret = 0.0;
};

struct ExperimentSummary {
  std::string comparator;
  double regret = 0.0;         // true regret against the comparator
  double pseudo_regret = 0.0;  // the quantity the bound controls
  std::optional<double> bound;
  std::optional<double> slack;
  std::optional<double> min_slack;
  std::size_t bound_violations = 0;
  bool bound_clamped = false;
  std::size_t restarts = 0;
  std::vector<RestartEvent> restart_events;
  std::vector<CheckpointRegret> checkpoints;
  std::size_t invariant_checks = 0;
  std::vector<std::string> invariant_violations;
  std::size_t invariant_violation_count = 0;
  int max_newton_iterations = 0;
  double wall_seconds = 0.0;
};

struct ExperimentTrace {
  ExperimentConfig config;
  std::string algorithm_name;
  Setting setting = Setting::experts;
  std::shared_ptr<const DomainOracle> domain;  // convex-loss runs
  Vector prior;                                 // expert runs

  std::vector<RoundRecord> rows;
  std::vector<Vector> played;
  std::vector<Vector> observations;  // loss vectors or true gradients
  std::vector<double> clip_ratios;
  std::vector<double> learner_losses;
  std::vector<OcoLoss> losses;       // convex-loss runs
  std::vector<Vector> inner_points;  // reduced runs, centered coordinates
  std::vector<Vector> inner_gradients;
  std::vector<BoundInputs> bound_inputs;

  ComparatorSpec comparator = ComparatorSpec::point(Vector::Zero(1));
  ExperimentSummary summary;
};

// Runs one experiment. With verify set, module invariants are checked after
// every round and failures are collected in the summary.
ExperimentTrace run_experiment(const ExperimentConfig& config, bool verify = false);

struct BoundCheck {
  std::string comparator;
  std::size_t rounds = 0;
  std::size_t violations = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  bool clamped = false;
};

// Re-evaluates the algorithm's bound at every round of a completed trace
// against another comparator (a distribution over experts, or a point of the
// domain).
BoundCheck check_bounds(const ExperimentTrace& trace, const ComparatorSpec& comparator);

// Best expert, or the minimizer of the summed convex losses over the
// domain, using rounds 1..prefix (0 means all rounds).
ComparatorSpec compute_offline_comparator(const ExperimentTrace& trace, std::size_t prefix = 0);

// Sum of the true losses of a fixed comparator over rounds 1..prefix.
double comparator_loss(const ExperimentTrace& trace, const ComparatorSpec& comparator,
                       std::size_t prefix = 0);

// Minimizer of a|u|^2/2 + <c, u> over the domain.
Vector minimize_quadratic(const DomainOracle& domain, double a, const Vector& c);

}  // namespace ladapt::harness
