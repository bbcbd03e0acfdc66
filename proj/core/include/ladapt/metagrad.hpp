#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ladapt/learner.hpp"
#include "ladapt/numerics.hpp"
#include "ladapt/projection.hpp"
#include "ladapt/regret.hpp"
#include "ladapt/scale_tracker.hpp"

namespace ladapt {

// Exponential learning-rate grid eta_i = 2^{-i}/(5B) with prior
// 1/((i+1)(i+2)); the prior mass of all indices >= n is 1/(n+1).
double grid_eta(std::size_t index, double base_scale);
double grid_prior(std::size_t index);
double grid_tail_mass(std::size_t first_index);

struct SlaveState {
  std::size_t index = 0;
  double eta = 0.0;
  std::size_t wake_time = 0;  // s_eta; first prediction in round wake_time + 1
  Vector mean;                // projected prediction
  Vector unprojected;
  Matrix gram;                // clipped Gram matrix accumulated since waking
  double log_weight = 0.0;    // log prior minus accumulated surrogate losses
  int newton_iterations = 0;  // of the most recent projection (0 if none)
  std::vector<double> surrogate_history;  // only filled when recording
};

// Surrogate loss -eta r + (eta r)^2 of one round for a slave, with
// r = <master - mean, clipped gradient>.
double clipped_surrogate(const Vector& master, const Vector& mean, const Vector& clipped,
                         double eta);

struct MetaGradState {
  MetaGradState(std::size_t dimension, double diameter, double initial_scale,
                NewtonSettings newton = {}, bool record_history = false);

  std::size_t dimension;
  double diameter;
  ScaleTracker scale;
  NewtonSettings newton;
  bool record_history;

  // Active slaves ordered by grid index (largest eta first).
  std::vector<SlaveState> active;
  std::size_t woken = 0;               // indices [0, woken) have woken up
  std::size_t lowest_admissible = 0;   // smallest index with eta <= 1/(5 B_t)
  std::size_t evictions = 0;

  CompensatedSum wake_sum;             // D sum |g-bar_s|
  CompensatedSum clipped_gram_trace;   // sum |g-bar_s|^2
  CompensatedSum squared_magnitudes;   // sum b_s^2 through the last round
  double squared_magnitudes_before = 0.0;  // the same sum without the last round

  Vector prediction;
  RegretLedger ledger;
  std::size_t rounds = 0;
  int max_newton_iterations = 0;
};

// Evicts slaves whose eta exceeds 1/(5 B_t) and wakes every grid point with
// eta >= 1/(wake_sum + B_t); the newly woken ones start in the next round.
void update_active_set(MetaGradState& state);

// Second-order update of one slave for the round's clipped gradient.
void slave_update(SlaveState& slave, const Vector& master, const Vector& clipped,
                  double diameter, const NewtonSettings& newton = {});

// Weighted mean of the active slaves with weights eta * w; the origin when
// no slave is active.
Vector master_predict(const MetaGradState& state);

const Vector& metagrad_round(MetaGradState& state, const Gradient& gradient);

// Prior mass of admissible slaves that have not woken, plus the weights of
// the active ones.
double metagrad_potential(const MetaGradState& state);

// MetaGrad+C on the centered ball of diameter D.
class MetaGradC : public OcoLearner {
 public:
  MetaGradC(std::size_t dimension, double diameter, double initial_scale,
            NewtonSettings newton = {}, bool record_history = false);

  std::string name() const override { return "metagrad+c"; }
  std::size_t dimension() const override { return state_.dimension; }
  const Vector& prediction() const override { return state_.prediction; }
  const Vector& round(const Gradient& gradient) override;
  RoundDiagnostics diagnostics() const override;

  const MetaGradState& state() const { return state_; }
  double potential() const { return metagrad_potential(state_); }

 private:
  MetaGradState state_;
};

}  // namespace ladapt
