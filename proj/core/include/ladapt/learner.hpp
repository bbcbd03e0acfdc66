#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "ladapt/numerics.hpp"
#include "ladapt/types.hpp"

namespace ladapt {

// What a learner reports about the round it just consumed.
struct RoundDiagnostics {
  double magnitude = 0.0;      // b_t
  double running_max = 0.0;    // B_t
  double clip_ratio = 1.0;     // B_{t-1}/B_t as applied by the learner
  std::optional<std::size_t> active_slaves;
  std::optional<double> potential;
  bool restarted = false;
};

// Round protocol for prediction with expert advice: read prediction(), then
// hand the round's losses to round(), which returns the next prediction.
class ExpertLearner {
 public:
  virtual ~ExpertLearner() = default;
  virtual std::string name() const = 0;
  virtual std::size_t experts() const = 0;
  virtual const Vector& prediction() const = 0;
  virtual const Vector& round(const LossVector& loss) = 0;
  virtual RoundDiagnostics diagnostics() const = 0;
};

// Round protocol for online convex optimization; the gradient must be taken
// at the point returned by prediction().
class OcoLearner {
 public:
  virtual ~OcoLearner() = default;
  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual const Vector& prediction() const = 0;
  virtual const Vector& round(const Gradient& gradient) = 0;
  virtual RoundDiagnostics diagnostics() const = 0;
};

}  // namespace ladapt
