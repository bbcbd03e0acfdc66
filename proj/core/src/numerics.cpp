#include "ladapt/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace ladapt {

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double peak = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(peak)) return peak;
  double total = 0.0;
  for (double v : values) total += std::exp(v - peak);
  return peak + std::log(total);
}

namespace {

// Continued fraction of erfc for large arguments, evaluated bottom-up:
// erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
double erfcx_continued_fraction(double x) {
  constexpr int kTerms = 60;
  double f = x;
  for (int n = kTerms; n >= 1; --n) f = x + 0.5 * n / f;
  return 1.0 / (f * std::sqrt(std::numbers::pi));
}

}  // namespace

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) {
    const double hi = x * x;
    const double lo = std::fma(x, x, -hi);
    return 2.0 * std::exp(hi) * (1.0 + lo) - erfcx(-x);
  }
  if (x < 26.0) {
    // Split x^2 into hi + lo exactly so that exp(x^2) keeps full precision.
    const double hi = x * x;
    const double lo = std::fma(x, x, -hi);
    return std::exp(hi) * std::erfc(x) * (1.0 + lo);
  }
  return erfcx_continued_fraction(x);
}

namespace {

// QUADPACK qk15 abscissae and weights (Kronrod 15 / Gauss 7).
constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lower;
  double upper;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod_15(const std::function<double(double)>& f, double lower,
                         double upper) {
  const double center = 0.5 * (lower + upper);
  const double half = 0.5 * (upper - lower);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  return {lower, upper, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double lower, double upper, double abs_tol,
                                    double rel_tol, int max_intervals) {
  if (!(upper >= lower)) {
    throw std::invalid_argument("integrate_adaptive: upper < lower");
  }
  QuadratureResult result;
  if (upper == lower) return result;

  std::priority_queue<Segment> queue;
  Segment first = gauss_kronrod_15(f, lower, upper);
  result.evaluations = 15;
  double value = first.value;
  double error = first.error;
  queue.push(first);

  while (error > std::max(abs_tol, rel_tol * std::abs(value)) &&
         static_cast<int>(queue.size()) < max_intervals) {
    const Segment worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lower + worst.upper);
    if (mid <= worst.lower || mid >= worst.upper) {
      queue.push(worst);
      break;
    }
    const Segment left = gauss_kronrod_15(f, worst.lower, mid);
    const Segment right = gauss_kronrod_15(f, mid, worst.upper);
    result.evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }

  // Re-sum from the segments to drop the drift of the running updates.
  CompensatedSum total;
  double total_error = 0.0;
  while (!queue.empty()) {
    total.add(queue.top().value);
    total_error += queue.top().error;
    queue.pop();
  }
  result.value = total.value();
  result.error_estimate = total_error;
  return result;
}

const GaussLegendreRule& gauss_legendre(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, GaussLegendreRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / static_cast<double>(j);
      }
      derivative = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / derivative;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * derivative * derivative);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace ladapt
