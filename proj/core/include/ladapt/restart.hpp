#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "ladapt/learner.hpp"
#include "ladapt/metagrad.hpp"
#include "ladapt/regret.hpp"
#include "ladapt/scale_tracker.hpp"
#include "ladapt/squint.hpp"

namespace ladapt {

struct RestartEvent {
  std::size_t round = 0;  // the round that fired the trigger
  double old_scale = 0.0;
  double new_scale = 0.0;
};

// Scale bookkeeping for the restart wrapper. The global tracker starts
// deferred: the first nonzero magnitude starts the first epoch with
// B = B_tau1. After each later round the epoch is restarted when
// B_t / B_tau1 > sum_{s<=t} b_s/B_s (sums from round 1, never reset).
class RestartSupervisor {
 public:
  enum class Action { idle, start, proceed, restart };

  RestartSupervisor();

  // Feed b_t once the running learner (if any) has consumed round t.
  Action observe(double magnitude);

  bool running() const { return epoch_count_ > 0; }
  double epoch_scale() const { return epoch_scale_; }
  std::size_t epoch_count() const { return epoch_count_; }
  std::size_t epoch_start_round() const { return epoch_start_round_; }
  std::size_t rounds() const { return global_.rounds(); }
  const ScaleTracker& global() const { return global_; }
  const std::vector<RestartEvent>& restarts() const { return restarts_; }

  // sum_{s<=t} b_s/B_s through the previous and the current round.
  double ratio_sum_before() const { return ratio_sum_before_; }
  // sum_t b_t^2 / B_t^2 and sum_t (sum_{s<=t} b_s/B_s)^2.
  double squared_ratio_sum() const { return squared_ratio_sum_.value(); }
  double squared_cumulative_ratio_sum() const { return squared_cumulative_sum_.value(); }

 private:
  ScaleTracker global_;
  double epoch_scale_ = 0.0;
  std::size_t epoch_count_ = 0;
  std::size_t epoch_start_round_ = 0;
  std::vector<RestartEvent> restarts_;
  double ratio_sum_before_ = 0.0;
  CompensatedSum squared_ratio_sum_;
  CompensatedSum squared_cumulative_sum_;
};

// Squint+C wrapped in restarts. Plays the prior until the first round with
// nonzero regret range.
class SquintL : public ExpertLearner {
 public:
  explicit SquintL(Vector prior, bool track_potential = false);
  static SquintL uniform(std::size_t experts, bool track_potential = false);

  std::string name() const override { return "squint+l"; }
  std::size_t experts() const override { return static_cast<std::size_t>(prior_.size()); }
  const Vector& prediction() const override { return prediction_; }
  const Vector& round(const LossVector& loss) override;
  RoundDiagnostics diagnostics() const override;

  const Vector& prior() const { return prior_; }
  const RestartSupervisor& supervisor() const { return supervisor_; }
  const SquintC* inner() const { return inner_.get(); }
  // Unclipped regret over the whole run.
  const RegretLedger& ledger() const { return ledger_; }

 private:
  Vector prior_;
  bool track_potential_;
  RestartSupervisor supervisor_;
  std::unique_ptr<SquintC> inner_;
  Vector prediction_;
  RegretLedger ledger_;
  bool restarted_ = false;
};

// MetaGrad+C on the centered ball wrapped in restarts. Plays the origin
// until the first nonzero gradient.
class MetaGradL : public OcoLearner {
 public:
  MetaGradL(std::size_t dimension, double diameter, NewtonSettings newton = {});

  std::string name() const override { return "metagrad+l"; }
  std::size_t dimension() const override { return dimension_; }
  const Vector& prediction() const override { return prediction_; }
  const Vector& round(const Gradient& gradient) override;
  RoundDiagnostics diagnostics() const override;

  double diameter() const { return diameter_; }
  const RestartSupervisor& supervisor() const { return supervisor_; }
  const MetaGradC* inner() const { return inner_.get(); }
  const RegretLedger& ledger() const { return ledger_; }
  // Largest Newton iteration count seen in any epoch.
  int max_newton_iterations() const;

 private:
  std::size_t dimension_;
  double diameter_;
  NewtonSettings newton_;
  RestartSupervisor supervisor_;
  std::unique_ptr<MetaGradC> inner_;
  Vector prediction_;
  RegretLedger ledger_;
  bool restarted_ = false;
  int retired_newton_iterations_ = 0;
};

}  // namespace ladapt
