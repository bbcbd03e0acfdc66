#include "ladapt/metagrad.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace ladapt {

namespace {

// Relative slack on the grid comparisons, so that quantities which agree
// up to rounding (the same stream at another scale) make the same call.
constexpr double kGridSlack = 1e-12;

}  // namespace

double grid_eta(std::size_t index, double base_scale) {
  return std::ldexp(1.0, -static_cast<int>(index)) / (5.0 * base_scale);
}

double grid_prior(std::size_t index) {
  const double i = static_cast<double>(index);
  return 1.0 / ((i + 1.0) * (i + 2.0));
}

double grid_tail_mass(std::size_t first_index) {
  return 1.0 / (static_cast<double>(first_index) + 1.0);
}

double clipped_surrogate(const Vector& master, const Vector& mean, const Vector& clipped,
                         double eta) {
  const double x = eta * (master - mean).dot(clipped);
  return -x + x * x;
}

MetaGradState::MetaGradState(std::size_t dimension_in, double diameter_in,
                             double initial_scale, NewtonSettings newton_in,
                             bool record_history_in)
    : dimension(dimension_in),
      diameter(diameter_in),
      scale(initial_scale),
      newton(newton_in),
      record_history(record_history_in),
      prediction(Vector::Zero(static_cast<Eigen::Index>(dimension_in))),
      ledger(LedgerMode::linearized, std::max<std::size_t>(dimension_in, 1)) {
  if (dimension < 1) throw InvalidInput("MetaGradState: dimension must be at least 1");
  if (!(diameter > 0.0) || !std::isfinite(diameter)) {
    throw InvalidInput(fmt::format("MetaGradState: diameter must be positive, got {}", diameter));
  }
  update_active_set(*this);
}

void update_active_set(MetaGradState& state) {
  const double base = state.scale.initial_scale();
  const double current = state.scale.current_max();

  const double growth = current / base;
  while (std::ldexp(1.0, static_cast<int>(state.lowest_admissible)) < growth * (1.0 - kGridSlack)) {
    ++state.lowest_admissible;
  }
  const auto first_kept = std::find_if(state.active.begin(), state.active.end(),
                                       [&](const SlaveState& s) {
                                         return s.index >= state.lowest_admissible;
                                       });
  state.evictions += static_cast<std::size_t>(first_kept - state.active.begin());
  state.active.erase(state.active.begin(), first_kept);

  const double reach = (state.wake_sum.value() + current) / (5.0 * base);
  while (reach >= std::ldexp(1.0, static_cast<int>(state.woken)) * (1.0 - kGridSlack)) {
    const std::size_t index = state.woken++;
    if (index < state.lowest_admissible) continue;
    SlaveState slave;
    slave.index = index;
    slave.eta = grid_eta(index, base);
    slave.wake_time = state.rounds;
    slave.mean = Vector::Zero(static_cast<Eigen::Index>(state.dimension));
    slave.unprojected = slave.mean;
    slave.gram = Matrix::Zero(slave.mean.size(), slave.mean.size());
    slave.log_weight = std::log(grid_prior(index));
    state.active.push_back(std::move(slave));
  }
}

void slave_update(SlaveState& slave, const Vector& master, const Vector& clipped,
                  double diameter, const NewtonSettings& newton) {
  slave.newton_iterations = 0;
  if (clipped.isZero(0.0)) return;
  slave.gram.noalias() += clipped * clipped.transpose();

  const BallProjector projector(diameter, slave.gram, newton);
  const double eta = slave.eta;
  const double factor = 1.0 + 2.0 * eta * (slave.mean - master).dot(clipped);
  slave.unprojected = slave.mean - eta * factor * projector.apply_inverse_metric(clipped, eta);
  BallProjection projected = projector.project(slave.unprojected, eta);
  slave.newton_iterations = projected.solve.iterations;
  slave.mean = std::move(projected.point);
}

Vector master_predict(const MetaGradState& state) {
  if (state.active.empty()) return Vector::Zero(static_cast<Eigen::Index>(state.dimension));
  std::vector<double> log_mass(state.active.size());
  for (std::size_t j = 0; j < state.active.size(); ++j) {
    log_mass[j] = std::log(state.active[j].eta) + state.active[j].log_weight;
  }
  const double normalizer = log_sum_exp(log_mass);
  Vector combined = Vector::Zero(static_cast<Eigen::Index>(state.dimension));
  for (std::size_t j = 0; j < state.active.size(); ++j) {
    combined += std::exp(log_mass[j] - normalizer) * state.active[j].mean;
  }
  return combined;
}

const Vector& metagrad_round(MetaGradState& state, const Gradient& gradient) {
  if (gradient.size() != state.dimension) {
    throw InvalidInput(fmt::format("metagrad_round: expected gradient of dimension {}, got {}",
                                   state.dimension, gradient.size()));
  }
  const Vector& g = gradient.values();
  const double magnitude = state.diameter * g.norm();
  state.scale.observe(magnitude);
  const double ratio = state.scale.clip_ratio();
  const Vector clipped = ratio * g;

  state.ledger.record(state.prediction, g, ratio);
  for (SlaveState& slave : state.active) {
    const double surrogate = clipped_surrogate(state.prediction, slave.mean, clipped, slave.eta);
    slave.log_weight -= surrogate;
    if (state.record_history) slave.surrogate_history.push_back(surrogate);
    slave_update(slave, state.prediction, clipped, state.diameter, state.newton);
    state.max_newton_iterations = std::max(state.max_newton_iterations, slave.newton_iterations);
  }

  state.wake_sum.add(ratio * magnitude);
  state.clipped_gram_trace.add(clipped.squaredNorm());
  state.squared_magnitudes_before = state.squared_magnitudes.value();
  state.squared_magnitudes.add(magnitude * magnitude);
  ++state.rounds;

  update_active_set(state);
  state.prediction = master_predict(state);
  return state.prediction;
}

double metagrad_potential(const MetaGradState& state) {
  CompensatedSum total(grid_tail_mass(std::max(state.lowest_admissible, state.woken)));
  for (const SlaveState& slave : state.active) total.add(std::exp(slave.log_weight));
  return total.value();
}

MetaGradC::MetaGradC(std::size_t dimension, double diameter, double initial_scale,
                     NewtonSettings newton, bool record_history)
    : state_(dimension, diameter, initial_scale, newton, record_history) {}

const Vector& MetaGradC::round(const Gradient& gradient) {
  return metagrad_round(state_, gradient);
}

RoundDiagnostics MetaGradC::diagnostics() const {
  RoundDiagnostics d;
  d.magnitude = state_.scale.last_observed();
  d.running_max = state_.scale.current_max();
  d.clip_ratio = state_.scale.clip_ratio();
  d.active_slaves = state_.active.size();
  d.potential = metagrad_potential(state_);
  return d;
}

}  // namespace ladapt
