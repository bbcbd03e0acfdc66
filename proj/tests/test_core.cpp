#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "ladapt/harness/rng.hpp"
#include "ladapt/regret.hpp"
#include "ladapt/scale_tracker.hpp"
#include "ladapt/types.hpp"

namespace ladapt {
namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

TEST(ScaleTracker, NewMaximumHalvesTheRatio) {
  ScaleTracker s(1.0);
  s.observe(2.0);
  EXPECT_EQ(s.current_max(), 2.0);
  EXPECT_EQ(s.clip_ratio(), 0.5);
  EXPECT_EQ(s.previous_max(), 1.0);
  EXPECT_EQ(s.last_observed(), 2.0);
}

TEST(ScaleTracker, NoNewMaximumLeavesRatioAtOne) {
  ScaleTracker s(1.0);
  s.observe(3.0);
  s.observe(1.0);
  EXPECT_EQ(s.current_max(), 3.0);
  EXPECT_EQ(s.clip_ratio(), 1.0);
}

TEST(ScaleTracker, RatioSumOfDoublingMagnitudes) {
  ScaleTracker s(1.0);
  for (double b : {1.0, 2.0, 4.0}) s.observe(b);
  EXPECT_DOUBLE_EQ(s.sum_ratio(), 3.0);
  EXPECT_EQ(s.rounds(), 3u);
}

TEST(ScaleTracker, ClipAppliesTheRatio) {
  ScaleTracker s(1.0);
  s.observe(1.0);
  EXPECT_EQ(s.clip(vec({3.0, -1.0})), vec({3.0, -1.0}));
  s.observe(2.0);
  EXPECT_EQ(s.clip(vec({2.0, -4.0})), vec({1.0, -2.0}));
}

TEST(ScaleTracker, RejectsBadMagnitudes) {
  ScaleTracker s(1.0);
  EXPECT_THROW(s.observe(std::numeric_limits<double>::quiet_NaN()), InvalidInput);
  EXPECT_THROW(s.observe(std::numeric_limits<double>::infinity()), InvalidInput);
  EXPECT_THROW(s.observe(-1.0), InvalidInput);
  EXPECT_THROW(ScaleTracker(0.0), InvalidInput);
}

TEST(ScaleTracker, DeferredWaitsForFirstSignal) {
  ScaleTracker s = ScaleTracker::deferred();
  s.observe(0.0);
  s.observe(0.0);
  EXPECT_FALSE(s.initialized());
  EXPECT_EQ(s.sum_ratio(), 0.0);
  s.observe(5.0);
  EXPECT_TRUE(s.initialized());
  EXPECT_EQ(s.initial_scale(), 5.0);
  EXPECT_EQ(s.current_max(), 5.0);
  EXPECT_DOUBLE_EQ(s.sum_ratio(), 1.0);
}

TEST(ScaleTracker, InvariantsOnRandomStream) {
  harness::Rng rng(4);
  ScaleTracker s(0.3);
  double last_max = s.current_max();
  double last_sum = 0.0;
  for (int t = 1; t <= 2000; ++t) {
    const double b = rng.uniform() * std::pow(10.0, rng.uniform(-3.0, 3.0));
    s.observe(b);
    ASSERT_GE(s.current_max(), last_max);
    // The stored ratio reproduces the previous maximum to the last bit.
    ASSERT_EQ(s.clip_ratio() * s.current_max(), last_max) << t;
    const double increment = s.sum_ratio() - last_sum;
    ASSERT_GE(increment, -1e-12);
    ASSERT_LE(increment, 1.0 + 1e-12);
    ASSERT_LE(s.sum_ratio(), static_cast<double>(t) + 1e-9);
    last_max = s.current_max();
    last_sum = s.sum_ratio();
  }
}

TEST(Types, LossVectorValidation) {
  EXPECT_THROW(LossVector(vec({1.0})), InvalidInput);
  EXPECT_THROW(LossVector(vec({1.0, std::nan("")})), InvalidInput);
  EXPECT_NO_THROW(LossVector(vec({1.0, -2.0})));
}

TEST(Types, GradientValidation) {
  EXPECT_THROW(Gradient(Vector(0)), InvalidInput);
  EXPECT_THROW(Gradient(vec({std::numeric_limits<double>::infinity()})), InvalidInput);
}

TEST(Types, ComparatorValidation) {
  EXPECT_THROW(ComparatorSpec::distribution(vec({0.5, 0.4})), InvalidInput);
  EXPECT_THROW(ComparatorSpec::distribution(vec({1.5, -0.5})), InvalidInput);
  EXPECT_THROW(ComparatorSpec::single_expert(3, 3), InvalidInput);
  const auto c = ComparatorSpec::single_expert(1, 3);
  EXPECT_EQ(c.weights(), vec({0.0, 1.0, 0.0}));
}

TEST(RegretLedger, PlayingTheComparatorGivesZero) {
  RegretLedger ledger(LedgerMode::linearized, 2);
  const Vector u = vec({0.3, -0.2});
  ledger.record(u, vec({1.0, 2.0}), 1.0);
  ledger.record(u, vec({-4.0, 0.5}), 0.5);
  EXPECT_NEAR(regret_vs(ledger, ComparatorSpec::point(u)), 0.0, 1e-15);
}

TEST(RegretLedger, UniformLearnerAgainstBetterExpert) {
  RegretLedger ledger(LedgerMode::experts, 2);
  const int T = 40;
  for (int t = 0; t < T; ++t) ledger.record(vec({0.5, 0.5}), vec({0.0, 1.0}), 1.0);
  EXPECT_DOUBLE_EQ(regret_vs(ledger, ComparatorSpec::single_expert(0, 2)), T / 2.0);
}

TEST(RegretLedger, MatchesRecomputationFromStoredRounds) {
  harness::Rng rng(11);
  const int K = 4;
  RegretLedger ledger(LedgerMode::experts, K);
  std::vector<Vector> played, losses;
  std::vector<double> ratios;
  for (int t = 0; t < 5; ++t) {
    Vector p(K), l(K);
    for (int k = 0; k < K; ++k) {
      p[k] = rng.uniform();
      l[k] = rng.uniform(-2.0, 3.0);
    }
    p /= p.sum();
    const double ratio = rng.uniform(0.2, 1.0);
    ledger.record(p, l, ratio);
    played.push_back(p);
    losses.push_back(l);
    ratios.push_back(ratio);
  }
  Vector rho = vec({0.1, 0.2, 0.3, 0.4});
  double R = 0.0, Rc = 0.0, V = 0.0, Vc = 0.0;
  for (int t = 0; t < 5; ++t) {
    for (int k = 0; k < K; ++k) {
      const double r = played[t].dot(losses[t]) - losses[t][k];
      R += rho[k] * r;
      Rc += rho[k] * ratios[t] * r;
      V += rho[k] * r * r;
      Vc += rho[k] * ratios[t] * ratios[t] * r * r;
    }
  }
  const RegretSummary s = ledger.against(ComparatorSpec::distribution(rho));
  EXPECT_NEAR(s.regret, R, 1e-12);
  EXPECT_NEAR(s.clipped_regret, Rc, 1e-12);
  EXPECT_NEAR(s.variance, V, 1e-12);
  EXPECT_NEAR(s.clipped_variance, Vc, 1e-12);
}

TEST(RegretLedger, LinearizedRecomputation) {
  harness::Rng rng(12);
  const int d = 3;
  RegretLedger ledger(LedgerMode::linearized, d);
  Vector u(d);
  for (int i = 0; i < d; ++i) u[i] = rng.uniform(-1.0, 1.0);
  double R = 0.0, Rc = 0.0, V = 0.0, Vc = 0.0;
  for (int t = 0; t < 200; ++t) {
    Vector w(d), g(d);
    for (int i = 0; i < d; ++i) {
      w[i] = rng.uniform(-1.0, 1.0);
      g[i] = rng.normal() * 10.0;
    }
    const double ratio = rng.uniform(0.1, 1.0);
    ledger.record(w, g, ratio);
    const double r = (w - u).dot(g);
    R += r;
    Rc += ratio * r;
    V += r * r;
    Vc += ratio * ratio * r * r;
  }
  const RegretSummary s = ledger.against(ComparatorSpec::point(u));
  EXPECT_NEAR(s.regret, R, 1e-9 * std::abs(R) + 1e-9);
  EXPECT_NEAR(s.clipped_regret, Rc, 1e-9 * std::abs(Rc) + 1e-9);
  EXPECT_NEAR(s.variance, V, 1e-9 * V);
  EXPECT_NEAR(s.clipped_variance, Vc, 1e-9 * Vc);
}

TEST(RegretLedger, RejectsMismatchesAndEmptyLedgers) {
  RegretLedger ledger(LedgerMode::linearized, 2);
  EXPECT_THROW(ledger.against(ComparatorSpec::point(vec({0.0, 0.0}))), InvalidInput);
  EXPECT_THROW(ledger.record(vec({0.0}), vec({1.0, 1.0}), 1.0), InvalidInput);
  ledger.record(vec({0.0, 0.0}), vec({1.0, 1.0}), 1.0);
  EXPECT_THROW(ledger.against(ComparatorSpec::point(vec({0.0, 0.0, 0.0}))), InvalidInput);
}

}  // namespace
}  // namespace ladapt
