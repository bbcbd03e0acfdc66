#pragma once

#include <cstddef>

#include "ladapt/numerics.hpp"

namespace ladapt::harness {

// max(0, log2 x), with log2+ of 0 taken as 0.
double log2_plus(double x);

// KL(rho || pi); terms with rho_k = 0 contribute 0.
double kl_divergence(const Vector& rho, const Vector& prior);

struct BoundValue {
  double value = 0.0;
  double complexity = 0.0;  // the C or Gamma term inside the bound
  bool clamped = false;     // a ln ln term was evaluated at its clamp
};

// Squint+C with input B, for the unclipped regret:
//   R <= sqrt(2 Vbar)(1 + sqrt(2C)) + 5 B_{T-1}(C + ln 2) + B_T - B,
//   C = KL + ln(ln(B_{T-1}/B) + 1/2 + ln(2 + S_{T-1})),
// where S_{T-1} = sum_{t<T} b_t/B_t.
BoundValue squint_c_bound(double clipped_variance, double kl, double initial_scale,
                          double previous_max, double current_max, double ratio_sum_before);

// Squint+L:
//   R <= 2 sqrt(V)(1 + sqrt(2 Gamma)) + 10 B_T (Gamma + ln 2) + 4 B_T,
//   Gamma = KL + ln(ln S_{T-1} + 1/2 + ln(2 + S_{T-1})).
// ln S_{T-1} is evaluated as ln max(e, S_{T-1}) (flagged as clamped when
// S_{T-1} < e), since the logarithm of a sum below 1 would make Gamma
// undefined.
BoundValue squint_l_bound(double variance, double kl, double ratio_sum_before, double current_max);

// MetaGrad+C with input B, for the clipped pseudo-regret:
//   3 sqrt(Vbar C) + 15 B_T C,
//   C = d ln(1 + (2 sum_{t<T} b_t^2 + 2 B_{T-1}^2) / (25 d B_{T-1}^2))
//       + 2 ln(log2+(sqrt(sum_{t<=T} b_t^2)/B) + 3) + 2.
BoundValue metagrad_c_bound(double clipped_variance, std::size_t dimension,
                            double squared_sum_before, double previous_max, double squared_sum,
                            double initial_scale, double current_max);

// MetaGrad+L:
//   3 sqrt(V Gamma) + 15 B_T Gamma + 4 B_T,
//   Gamma = 2d ln(27/25 + 2/(25d) sum_t b_t^2/B_t^2)
//           + 4 ln(log2+ sqrt(sum_t S_t^2) + 3) + 4.
BoundValue metagrad_l_bound(double variance, std::size_t dimension, double squared_ratio_sum,
                            double squared_cumulative_ratio_sum, double current_max);

// Ball reduction around MetaGrad+C, in terms of the played points and true
// gradients (variance) and the inner learner's scales:
//   3 sqrt(V Gamma) + 24 B_T Gamma + B_T,
//   Gamma = d ln(27/25 + 2 sum_{t<T} b_t^2 / (25 d B_{T-1}^2))
//           + 2 ln(log2+(sqrt(sum_{t<=T} b_t^2)/B) + 3) + 2.
BoundValue reduction_bound(double variance, std::size_t dimension, double squared_sum_before,
                           double previous_max, double squared_sum, double initial_scale,
                           double current_max);

// Classical tuned Hedge guarantee L sqrt(T ln K / 2).
double hedge_classical_bound(std::size_t horizon, std::size_t experts, double range);

}  // namespace ladapt::harness
