#include "ladapt/restart.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace ladapt {

RestartSupervisor::RestartSupervisor() : global_(ScaleTracker::deferred()) {}

RestartSupervisor::Action RestartSupervisor::observe(double magnitude) {
  ratio_sum_before_ = global_.sum_ratio();
  global_.observe(magnitude);
  if (global_.initialized()) {
    const double r = magnitude / global_.current_max();
    squared_ratio_sum_.add(r * r);
    const double s = global_.sum_ratio();
    squared_cumulative_sum_.add(s * s);
  }

  if (!running()) {
    if (!global_.initialized()) return Action::idle;
    epoch_scale_ = global_.current_max();
    epoch_count_ = 1;
    epoch_start_round_ = global_.rounds();
    return Action::start;
  }
  if (global_.current_max() / epoch_scale_ > global_.sum_ratio()) {
    restarts_.push_back(RestartEvent{global_.rounds(), epoch_scale_, global_.current_max()});
    epoch_scale_ = global_.current_max();
    ++epoch_count_;
    epoch_start_round_ = global_.rounds();
    return Action::restart;
  }
  return Action::proceed;
}

SquintL::SquintL(Vector prior, bool track_potential)
    : prior_(std::move(prior)),
      track_potential_(track_potential),
      prediction_(prior_),
      ledger_(LedgerMode::experts, static_cast<std::size_t>(std::max<Eigen::Index>(prior_.size(), 1))) {
  // Validates the prior the same way the inner learner will.
  SquintState probe(prior_, 1.0);
}

SquintL SquintL::uniform(std::size_t experts, bool track_potential) {
  if (experts < 2) throw InvalidInput("SquintL: need at least 2 experts");
  return SquintL(Vector::Constant(static_cast<Eigen::Index>(experts), 1.0 / static_cast<double>(experts)),
                 track_potential);
}

const Vector& SquintL::round(const LossVector& loss) {
  if (loss.size() != experts()) {
    throw InvalidInput(fmt::format("SquintL: expected {} losses, got {}", experts(), loss.size()));
  }
  const Vector played = prediction_;
  double magnitude = 0.0;
  if (inner_) {
    inner_->round(loss);
    magnitude = inner_->state().scale.last_observed();
  } else {
    magnitude = instantaneous_regret(played, loss.values()).cwiseAbs().maxCoeff();
  }
  const RestartSupervisor::Action action = supervisor_.observe(magnitude);
  ledger_.record(played, loss.values(), supervisor_.global().clip_ratio());

  restarted_ = action == RestartSupervisor::Action::restart;
  if (action == RestartSupervisor::Action::start || restarted_) {
    inner_ = std::make_unique<SquintC>(prior_, supervisor_.epoch_scale(), track_potential_);
  }
  prediction_ = inner_ ? inner_->prediction() : prior_;
  return prediction_;
}

RoundDiagnostics SquintL::diagnostics() const {
  RoundDiagnostics d;
  d.magnitude = supervisor_.global().last_observed();
  d.running_max = supervisor_.global().current_max();
  d.clip_ratio = supervisor_.global().clip_ratio();
  if (track_potential_ && inner_) d.potential = inner_->potential();
  d.restarted = restarted_;
  return d;
}

MetaGradL::MetaGradL(std::size_t dimension, double diameter, NewtonSettings newton)
    : dimension_(dimension),
      diameter_(diameter),
      newton_(newton),
      prediction_(Vector::Zero(static_cast<Eigen::Index>(dimension))),
      ledger_(LedgerMode::linearized, std::max<std::size_t>(dimension, 1)) {
  if (dimension < 1) throw InvalidInput("MetaGradL: dimension must be at least 1");
  if (!(diameter > 0.0) || !std::isfinite(diameter)) {
    throw InvalidInput(fmt::format("MetaGradL: diameter must be positive, got {}", diameter));
  }
}

const Vector& MetaGradL::round(const Gradient& gradient) {
  if (gradient.size() != dimension_) {
    throw InvalidInput(fmt::format("MetaGradL: expected gradient of dimension {}, got {}",
                                   dimension_, gradient.size()));
  }
  const Vector played = prediction_;
  double magnitude = 0.0;
  if (inner_) {
    inner_->round(gradient);
    magnitude = inner_->state().scale.last_observed();
  } else {
    magnitude = diameter_ * gradient.values().norm();
  }
  const RestartSupervisor::Action action = supervisor_.observe(magnitude);
  ledger_.record(played, gradient.values(), supervisor_.global().clip_ratio());

  restarted_ = action == RestartSupervisor::Action::restart;
  if (action == RestartSupervisor::Action::start || restarted_) {
    if (inner_) {
      retired_newton_iterations_ =
          std::max(retired_newton_iterations_, inner_->state().max_newton_iterations);
    }
    inner_ = std::make_unique<MetaGradC>(dimension_, diameter_, supervisor_.epoch_scale(), newton_);
  }
  prediction_ = inner_ ? inner_->prediction() : Vector::Zero(static_cast<Eigen::Index>(dimension_));
  return prediction_;
}

RoundDiagnostics MetaGradL::diagnostics() const {
  RoundDiagnostics d;
  d.magnitude = supervisor_.global().last_observed();
  d.running_max = supervisor_.global().current_max();
  d.clip_ratio = supervisor_.global().clip_ratio();
  d.active_slaves = inner_ ? inner_->state().active.size() : 0;
  if (inner_) d.potential = inner_->potential();
  d.restarted = restarted_;
  return d;
}

int MetaGradL::max_newton_iterations() const {
  const int current = inner_ ? inner_->state().max_newton_iterations : 0;
  return std::max(current, retired_newton_iterations_);
}

}  // namespace ladapt
