#include "ladapt/scale_tracker.hpp"

#include <cmath>
#include <string>

#include "ladapt/types.hpp"

namespace ladapt {

ScaleTracker::ScaleTracker(double initial_scale)
    : initialized_(true),
      initial_scale_(initial_scale),
      current_max_(initial_scale),
      previous_max_(initial_scale) {
  if (!(initial_scale > 0.0) || !std::isfinite(initial_scale)) {
    throw InvalidInput("ScaleTracker: initial scale must be positive and finite, got " +
                       std::to_string(initial_scale));
  }
}

ScaleTracker ScaleTracker::deferred() { return ScaleTracker(); }

void ScaleTracker::observe(double magnitude) {
  if (!std::isfinite(magnitude) || magnitude < 0.0) {
    throw InvalidInput("ScaleTracker: magnitude must be finite and nonnegative, got " +
                       std::to_string(magnitude));
  }
  ++rounds_;
  last_observed_ = magnitude;
  previous_max_ = current_max_;

  if (!initialized_) {
    if (magnitude == 0.0) {
      clip_ratio_ = 1.0;
      return;
    }
    initialized_ = true;
    initial_scale_ = magnitude;
    previous_max_ = magnitude;
    current_max_ = magnitude;
    clip_ratio_ = 1.0;
    sum_ratio_.add(1.0);
    return;
  }

  if (magnitude > current_max_) current_max_ = magnitude;
  clip_ratio_ = previous_max_ == current_max_ ? 1.0 : previous_max_ / current_max_;
  sum_ratio_.add(magnitude / current_max_);
}

}  // namespace ladapt
