#include <cmath>

#include <gtest/gtest.h>

#include "ladapt/harness/rng.hpp"
#include "ladapt/restart.hpp"
#include "ladapt/verify/suites.hpp"

namespace ladapt {
namespace {

using Action = RestartSupervisor::Action;

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

TEST(Supervisor, ConstantScaleNeverRestarts) {
  RestartSupervisor s;
  EXPECT_EQ(s.observe(2.0), Action::start);
  for (int t = 0; t < 500; ++t) EXPECT_EQ(s.observe(2.0), Action::proceed);
  EXPECT_TRUE(s.restarts().empty());
  EXPECT_EQ(s.epoch_count(), 1u);
}

TEST(Supervisor, MillionfoldJumpRestartsAtRoundTwo) {
  RestartSupervisor s;
  s.observe(1.0);
  EXPECT_EQ(s.observe(1e6), Action::restart);
  ASSERT_EQ(s.restarts().size(), 1u);
  EXPECT_EQ(s.restarts()[0].round, 2u);
  EXPECT_EQ(s.restarts()[0].old_scale, 1.0);
  EXPECT_EQ(s.restarts()[0].new_scale, 1e6);
  EXPECT_EQ(s.epoch_scale(), 1e6);
  EXPECT_EQ(s.epoch_start_round(), 2u);
}

TEST(Supervisor, IdleUntilTheFirstSignal) {
  RestartSupervisor s;
  EXPECT_EQ(s.observe(0.0), Action::idle);
  EXPECT_EQ(s.observe(0.0), Action::idle);
  EXPECT_FALSE(s.running());
  EXPECT_EQ(s.observe(0.3), Action::start);
  EXPECT_EQ(s.epoch_scale(), 0.3);
  EXPECT_EQ(s.epoch_start_round(), 3u);
}

TEST(Supervisor, SumsAreGlobal) {
  RestartSupervisor s;
  for (double b : {1.0, 2.0, 4.0}) s.observe(b);
  EXPECT_DOUBLE_EQ(s.global().sum_ratio(), 3.0);
  EXPECT_DOUBLE_EQ(s.ratio_sum_before(), 2.0);
  EXPECT_DOUBLE_EQ(s.squared_ratio_sum(), 3.0);
  EXPECT_DOUBLE_EQ(s.squared_cumulative_ratio_sum(), 1.0 + 4.0 + 9.0);
  // 4/1 > 3 fires at round 3; the sums keep running across the restart.
  ASSERT_EQ(s.restarts().size(), 1u);
  s.observe(4.0);
  EXPECT_DOUBLE_EQ(s.global().sum_ratio(), 4.0);
}

TEST(Supervisor, TriggerRoundsStrictlyIncrease) {
  harness::Rng rng(3);
  RestartSupervisor s;
  for (int t = 0; t < 2000; ++t) s.observe(std::pow(10.0, rng.uniform(0.0, 1.0) + (t % 97 == 0 ? t / 97 : 0)));
  for (std::size_t i = 1; i < s.restarts().size(); ++i) {
    ASSERT_GT(s.restarts()[i].round, s.restarts()[i - 1].round);
  }
}

TEST(SquintL, PlaysThePriorUntilTheFirstSignal) {
  const Vector prior = vec({0.7, 0.2, 0.1});
  SquintL learner(prior);
  learner.round(LossVector(vec({1.0, 1.0, 1.0})));
  EXPECT_EQ(learner.inner(), nullptr);
  EXPECT_EQ(learner.prediction(), prior);
  learner.round(LossVector(vec({0.0, 1.0, 1.0})));
  ASSERT_NE(learner.inner(), nullptr);
  // b_2 = max_k |<p - e_k, l>| = |0.3 - 1| = 0.7 starts the first epoch.
  EXPECT_NEAR(learner.inner()->state().scale.initial_scale(), 0.7, 1e-15);
  EXPECT_EQ(learner.inner()->state().rounds, 0u);
  EXPECT_EQ(learner.prediction(), prior);
}

TEST(SquintL, TriggeringRoundBelongsToTheOldEpoch) {
  SquintL learner = SquintL::uniform(2);
  learner.round(LossVector(vec({0.0, 1.0})));
  learner.round(LossVector(vec({0.0, 1.0})));
  const std::size_t before = learner.inner()->state().rounds;
  EXPECT_EQ(before, 1u);
  learner.round(LossVector(vec({0.0, 1e6})));
  ASSERT_EQ(learner.supervisor().restarts().size(), 1u);
  EXPECT_EQ(learner.supervisor().restarts()[0].round, 3u);
  EXPECT_EQ(learner.inner()->state().rounds, 0u);
  EXPECT_TRUE(learner.diagnostics().restarted);
}

TEST(MetaGradL, PlaysTheOriginUntilTheFirstSignal) {
  MetaGradL learner(2, 2.0);
  learner.round(Gradient(vec({0.0, 0.0})));
  EXPECT_EQ(learner.inner(), nullptr);
  EXPECT_EQ(learner.prediction(), Vector::Zero(2));
  learner.round(Gradient(vec({3.0, 4.0})));
  ASSERT_NE(learner.inner(), nullptr);
  EXPECT_DOUBLE_EQ(learner.inner()->state().scale.initial_scale(), 10.0);
}

TEST(Restart, ScaleFreeAcrossFactors) {
  const auto r = verify::check_scale_free(3, 77);
  EXPECT_TRUE(r.passed()) << r.detail;
}

TEST(Restart, GeometricStreamsRestartLogarithmically) {
  const auto r = verify::check_restart_count(78);
  EXPECT_TRUE(r.passed()) << r.detail;
}

}  // namespace
}  // namespace ladapt
