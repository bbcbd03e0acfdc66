#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "ladapt/numerics.hpp"

namespace ladapt {
namespace {

TEST(CompensatedSum, RecoversSmallTermsNextToLargeOnes) {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  EXPECT_DOUBLE_EQ(s.value(), 1000.0);
}

TEST(CompensatedSum, MatchesNaiveSumOnBenignInput) {
  CompensatedSum s(0.5);
  s += 0.25;
  s += 0.125;
  EXPECT_EQ(s.value(), 0.875);
}

TEST(LogSumExp, StableForLargeArguments) {
  const std::vector<double> v{1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(v), 1000.0 + std::log(2.0), 1e-12);
  const std::vector<double> w{-1000.0, -1001.0};
  EXPECT_NEAR(log_sum_exp(w), -1000.0 + std::log1p(std::exp(-1.0)), 1e-12);
}

TEST(LogSumExp, IgnoresNegativeInfinity) {
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> v{-inf, 0.0};
  EXPECT_DOUBLE_EQ(log_sum_exp(v), 0.0);
}

TEST(Erfcx, AgreesWithDefinitionWhereItIsRepresentable) {
  for (double x : {-3.0, -1.0, -0.1, 0.0, 0.3, 1.0, 2.5, 5.0, 9.0}) {
    const double expected = std::exp(x * x) * std::erfc(x);
    EXPECT_NEAR(erfcx(x), expected, 1e-14 * expected) << "x = " << x;
  }
}

TEST(Erfcx, AsymptoticTail) {
  // exp(x^2) erfc(x) ~ 1/(x sqrt(pi)) (1 - 1/(2x^2) + 3/(4x^4))
  const double x = 1e4;
  const double series = 1.0 / (x * std::sqrt(M_PI)) * (1.0 - 0.5 / (x * x) + 0.75 / (x * x * x * x));
  EXPECT_NEAR(erfcx(x), series, 1e-15 * series);
}

TEST(IntegrateAdaptive, PolynomialAndPeakedIntegrands) {
  const auto cubic = integrate_adaptive([](double x) { return x * x * x; }, 0.0, 2.0);
  EXPECT_NEAR(cubic.value, 4.0, 1e-13);
  const auto peak =
      integrate_adaptive([](double x) { return std::exp(-1e4 * (x - 0.3) * (x - 0.3)); }, 0.0, 1.0);
  EXPECT_NEAR(peak.value, std::sqrt(M_PI / 1e4), 1e-13);
}

TEST(GaussLegendre, IntegratesHighDegreePolynomialsExactly) {
  const GaussLegendreRule& rule = gauss_legendre(16);
  ASSERT_EQ(rule.nodes.size(), 16u);
  double weights = 0.0;
  double x30 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    weights += rule.weights[i];
    x30 += rule.weights[i] * std::pow(rule.nodes[i], 30);
  }
  EXPECT_NEAR(weights, 2.0, 1e-14);
  EXPECT_NEAR(x30, 2.0 / 31.0, 1e-14);
}

}  // namespace
}  // namespace ladapt
