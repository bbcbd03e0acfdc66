#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

// Randomized invariant checks shared by `ladapt verify`, the unit tests and
// the acceptance binary.
namespace ladapt::verify {

struct CheckResult {
  std::string name;
  std::size_t cases = 0;      // streams or instances examined
  std::size_t checks = 0;     // individual comparisons
  std::size_t failures = 0;
  double worst = 0.0;         // largest error, or smallest slack, as described in detail
  std::string detail;         // first failure, else a summary
  double seconds = 0.0;

  bool passed() const { return checks > 0 && failures == 0; }
};

// Squint potential against ln(B_{T-1}/B) after every round of random expert
// streams (K in {2, 5, 16}, T <= 500, x10 and x100 scale jumps); the core
// evaluator and an independent quadrature must both satisfy the bound.
CheckResult check_squint_potential(std::size_t streams, std::uint64_t seed);

// Closed-form Squint weights against quadrature on random states.
CheckResult check_squint_weights(std::size_t states, std::uint64_t seed);

// MetaGrad potential <= 1 after every round of random gradient streams
// (d in {1, 2, 5, 16}, T <= 500).
CheckResult check_metagrad_potential(std::size_t streams, std::uint64_t seed);

// At most floor(log2 t) slaves predict in round t.
CheckResult check_slave_count(std::size_t streams, std::uint64_t seed);

// R - Rbar <= B_T - B_0 after every round, for every expert and the uniform
// mixture (Squint) and for the origin, the axis points of the sphere and
// random interior points (MetaGrad).
CheckResult check_clipping_identity(std::size_t streams, std::uint64_t seed);

// Slave log-weights against the sum of their recorded surrogate losses.
CheckResult check_log_weights(std::size_t streams, std::uint64_t seed);

// Log-space master prediction against the direct weighted mean.
CheckResult check_master_formula(std::size_t streams, std::uint64_t seed);

// Ball projection against brute force, plus its KKT conditions, Newton
// residual, iteration count and bracket monotonicity (d in {1, 2, 3, 5}).
CheckResult check_projection(std::size_t instances, std::uint64_t seed);

// Newton root against 128-step bisection.
CheckResult check_newton_bisection(std::size_t instances, std::uint64_t seed);

// Squint+L and MetaGrad+L under losses scaled by 1e-3 and 1e3: identical
// predictions (1e-9 per coordinate) and restart rounds.
CheckResult check_scale_free(std::size_t streams, std::uint64_t seed);

// Restart counts on constant, single-jump and geometric streams.
CheckResult check_restart_count(std::uint64_t seed);

std::vector<std::string> suite_names();

// Runs every check of one suite: squint, metagrad, projection or restart.
std::vector<CheckResult> run_suite(const std::string& name, std::uint64_t seed);

}  // namespace ladapt::verify
