#include "ladapt/harness/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "ladapt/types.hpp"

namespace ladapt::harness {

double log2_plus(double x) { return x > 1.0 ? std::log2(x) : 0.0; }

double kl_divergence(const Vector& rho, const Vector& prior) {
  if (rho.size() != prior.size()) throw InvalidInput("kl_divergence: size mismatch");
  CompensatedSum total;
  for (Eigen::Index k = 0; k < rho.size(); ++k) {
    if (rho[k] > 0.0) total.add(rho[k] * std::log(rho[k] / prior[k]));
  }
  return std::max(0.0, total.value());
}

BoundValue squint_c_bound(double clipped_variance, double kl, double initial_scale,
                          double previous_max, double current_max, double ratio_sum_before) {
  const double C = kl + std::log(std::log(previous_max / initial_scale) + 0.5 +
                                 std::log(2.0 + ratio_sum_before));
  const double value = std::sqrt(2.0 * clipped_variance) * (1.0 + std::sqrt(2.0 * C)) +
                       5.0 * previous_max * (C + std::numbers::ln2) + current_max - initial_scale;
  return BoundValue{value, C, false};
}

BoundValue squint_l_bound(double variance, double kl, double ratio_sum_before, double current_max) {
  const bool clamped = ratio_sum_before < std::numbers::e;
  const double log_sum = std::log(std::max(std::numbers::e, ratio_sum_before));
  const double gamma = kl + std::log(log_sum + 0.5 + std::log(2.0 + ratio_sum_before));
  const double value = 2.0 * std::sqrt(variance) * (1.0 + std::sqrt(2.0 * gamma)) +
                       10.0 * current_max * (gamma + std::numbers::ln2) + 4.0 * current_max;
  return BoundValue{value, gamma, clamped};
}

BoundValue metagrad_c_bound(double clipped_variance, std::size_t dimension,
                            double squared_sum_before, double previous_max, double squared_sum,
                            double initial_scale, double current_max) {
  const double d = static_cast<double>(dimension);
  const double prev2 = previous_max * previous_max;
  const double C =
      d * std::log(1.0 + (2.0 * squared_sum_before + 2.0 * prev2) / (25.0 * d * prev2)) +
      2.0 * std::log(log2_plus(std::sqrt(squared_sum) / initial_scale) + 3.0) + 2.0;
  const double value = 3.0 * std::sqrt(clipped_variance * C) + 15.0 * current_max * C;
  return BoundValue{value, C, false};
}

BoundValue metagrad_l_bound(double variance, std::size_t dimension, double squared_ratio_sum,
                            double squared_cumulative_ratio_sum, double current_max) {
  const double d = static_cast<double>(dimension);
  const double gamma = 2.0 * d * std::log(27.0 / 25.0 + 2.0 / (25.0 * d) * squared_ratio_sum) +
                       4.0 * std::log(log2_plus(std::sqrt(squared_cumulative_ratio_sum)) + 3.0) +
                       4.0;
  const double value =
      3.0 * std::sqrt(variance * gamma) + 15.0 * current_max * gamma + 4.0 * current_max;
  return BoundValue{value, gamma, false};
}

BoundValue reduction_bound(double variance, std::size_t dimension, double squared_sum_before,
                           double previous_max, double squared_sum, double initial_scale,
                           double current_max) {
  const double d = static_cast<double>(dimension);
  const double gamma =
      d * std::log(27.0 / 25.0 + 2.0 * squared_sum_before / (25.0 * d * previous_max * previous_max)) +
      2.0 * std::log(log2_plus(std::sqrt(squared_sum) / initial_scale) + 3.0) + 2.0;
  const double value =
      3.0 * std::sqrt(variance * gamma) + 24.0 * current_max * gamma + current_max;
  return BoundValue{value, gamma, false};
}

double hedge_classical_bound(std::size_t horizon, std::size_t experts, double range) {
  return range * std::sqrt(static_cast<double>(horizon) / 2.0 * std::log(static_cast<double>(experts)));
}

}  // namespace ladapt::harness
