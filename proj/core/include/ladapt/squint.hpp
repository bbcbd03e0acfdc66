#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ladapt/learner.hpp"
#include "ladapt/numerics.hpp"
#include "ladapt/regret.hpp"
#include "ladapt/scale_tracker.hpp"

namespace ladapt {

// Integral of exp(eta R - eta^2 V) over eta in [0, a], for a > 0, V >= 0.
//
// Exact closed forms: (exp(aR) - 1)/R when V = 0 and R != 0, a when both are
// zero, and a Gaussian-CDF difference when V > 0. The latter is evaluated in
// log space with erfcx so that exp(R^2/(4V)) never materializes; when the
// integrand varies by less than a factor e over [0, a] (where the erf
// difference cancels) a 16-point Gauss-Legendre rule is used instead, which
// is exact to rounding for such near-constant integrands.
double log_exp_quadratic_integral(double R, double V, double a);
double exp_quadratic_integral(double R, double V, double a);

// r^k = <p - e_k, loss> for every expert k. Identical losses give exactly
// zero regret.
Vector instantaneous_regret(const Vector& p, const Vector& loss);

// Squint+C state: clipped per-expert regret/variance against a prior, plus
// the scale tracker that supplies B and B_t.
struct SquintState {
  SquintState(Vector prior, double initial_scale);

  std::size_t experts() const { return static_cast<std::size_t>(prior.size()); }
  Vector clipped_regret_values() const;
  Vector clipped_variance_values() const;

  Vector prior;
  std::vector<CompensatedSum> clipped_regret;
  std::vector<CompensatedSum> clipped_variance;
  ScaleTracker scale;
  Vector prediction;  // p-hat for the upcoming round; the prior at t = 1
  RegretLedger ledger;
  std::size_t rounds = 0;
};

// p-hat_{T+1}: p^k proportional to prior_k * integral over [0, 1/(2 B_T)].
Vector squint_weights(const SquintState& state);

// Consumes one loss vector: instantaneous regret against the unclipped loss
// sets b_t, the clipped loss feeds R-bar and V-bar, and the next prediction
// is returned (and stored in the state).
const Vector& squint_round(SquintState& state, const LossVector& loss);

// Diagnostic potential: sum_k prior_k times the integral over
// [0, 1/(2 B_{T-1})] of (exp(eta R-bar - eta^2 V-bar) - 1)/eta, by adaptive
// Gauss-Kronrod quadrature (1e-12 absolute). Zero before the first round.
double squint_potential(const SquintState& state);

class SquintC : public ExpertLearner {
 public:
  SquintC(Vector prior, double initial_scale, bool track_potential = true);
  static SquintC uniform(std::size_t experts, double initial_scale,
                         bool track_potential = true);

  std::string name() const override { return "squint+c"; }
  std::size_t experts() const override { return state_.experts(); }
  const Vector& prediction() const override { return state_.prediction; }
  const Vector& round(const LossVector& loss) override;
  RoundDiagnostics diagnostics() const override;

  const SquintState& state() const { return state_; }
  double potential() const { return squint_potential(state_); }

 private:
  SquintState state_;
  bool track_potential_;
};

}  // namespace ladapt
