#pragma once

#include <cstddef>
#include <vector>

#include "ladapt/numerics.hpp"
#include "ladapt/types.hpp"

namespace ladapt {

enum class LedgerMode {
  // f_t(p) = <p, l_t>; comparators are experts or distributions.
  experts,
  // Linearized losses <u_t - u, g_t>; comparators are points.
  linearized,
};

struct RegretSummary {
  double regret = 0.0;
  double clipped_regret = 0.0;
  double variance = 0.0;
  double clipped_variance = 0.0;
};

// Incremental regret accounting for every comparator at once.
//
// Each round records the played point, the raw observation (loss vector or
// gradient) and the clipping ratio applied to it. Regret is linear in the
// comparator and the variance is quadratic, so sufficient statistics are kept
// and any comparator can be evaluated after the fact.
class RegretLedger {
 public:
  RegretLedger(LedgerMode mode, std::size_t dimension);

  void record(const Vector& played, const Vector& observation, double clip_ratio);

  LedgerMode mode() const { return mode_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t rounds() const { return rounds_; }

  // Throws InvalidInput on dimension mismatch or when no round was recorded.
  RegretSummary against(const ComparatorSpec& comparator) const;

 private:
  struct Moments {
    CompensatedSum learner;      // sum <played, x>
    CompensatedSum learner_sq;   // sum <played, x>^2
    std::vector<CompensatedSum> total;  // sum x
    Vector cross;                // sum <played, x> x
    Matrix gram;                 // sum x x^T
  };

  void record_experts(const Vector& played, const Vector& loss, double clip_ratio);
  static void accumulate(Moments& m, const Vector& played, const Vector& x);
  static RegretSummary evaluate(const Moments& raw, const Moments& clipped,
                                const Vector& u);

  LedgerMode mode_;
  std::size_t dimension_;
  std::size_t rounds_ = 0;

  // experts: per-expert r, r-bar, r^2, r-bar^2
  std::vector<CompensatedSum> regret_;
  std::vector<CompensatedSum> clipped_regret_;
  std::vector<CompensatedSum> variance_;
  std::vector<CompensatedSum> clipped_variance_;

  // linearized
  Moments raw_;
  Moments clipped_;
};

// Cumulative regret of the recorded play against a comparator: expert losses
// in experts mode, linearized pseudo-regret in linearized mode.
double regret_vs(const RegretLedger& ledger, const ComparatorSpec& comparator);

}  // namespace ladapt
