#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ladapt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Neumaier-compensated running sum. Long runs accumulate 1e5+ terms of
// mixed sign and the regret/variance tests compare at 1e-9.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double initial) : sum_(initial) {}

  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double log_sum_exp(std::span<const double> values);

// Scaled complementary error function exp(x^2) * erfc(x). Accurate to a few
// ulp for x >= 0; negative arguments go through 2 exp(x^2) - erfcx(-x).
double erfcx(double x);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

// Globally adaptive Gauss-Kronrod (7/15) integration on [lower, upper].
// Bisects the interval with the largest error estimate until the summed
// estimate is below max(abs_tol, rel_tol * |value|).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double lower, double upper,
                                    double abs_tol = 1e-13,
                                    double rel_tol = 1e-13,
                                    int max_intervals = 2000);

// n-point Gauss-Legendre rule on [-1, 1], nodes computed by Newton iteration
// on P_n and cached per n.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendreRule& gauss_legendre(std::size_t n);

}  // namespace ladapt
