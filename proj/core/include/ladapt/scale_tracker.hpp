#pragma once

#include <cstddef>

#include "ladapt/numerics.hpp"

namespace ladapt {

// Running Lipschitz estimates of a loss or gradient stream.
//
// Per round the caller reports the observed magnitude b_t. The tracker keeps
// B_t = B v max_{s<=t} b_s (with B_0 = B), the clipping ratio B_{t-1}/B_t for
// the round just observed, and the sum of b_s/B_s.
//
// A deferred tracker has no initial scale: it stays uninitialized, with
// B_t = 0, until the first nonzero magnitude arrives, which then becomes B.
// Zero magnitudes before that contribute 0 to the ratio sum.
class ScaleTracker {
 public:
  explicit ScaleTracker(double initial_scale);
  static ScaleTracker deferred();

  // Throws InvalidInput for negative or non-finite magnitudes.
  void observe(double magnitude);

  template <class Derived>
  Vector clip(const Eigen::MatrixBase<Derived>& raw) const {
    return raw * clip_ratio_;
  }

  bool initialized() const { return initialized_; }
  double initial_scale() const { return initial_scale_; }
  double current_max() const { return current_max_; }
  // B_{t-1}; equals initial_scale before the first round.
  double previous_max() const { return previous_max_; }
  double last_observed() const { return last_observed_; }
  double clip_ratio() const { return clip_ratio_; }
  double sum_ratio() const { return sum_ratio_.value(); }
  std::size_t rounds() const { return rounds_; }

 private:
  ScaleTracker() = default;

  bool initialized_ = false;
  double initial_scale_ = 0.0;
  double current_max_ = 0.0;
  double previous_max_ = 0.0;
  double last_observed_ = 0.0;
  double clip_ratio_ = 1.0;
  CompensatedSum sum_ratio_;
  std::size_t rounds_ = 0;
};

}  // namespace ladapt
