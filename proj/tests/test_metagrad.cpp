#include <cmath>

#include <gtest/gtest.h>

#include "ladapt/harness/rng.hpp"
#include "ladapt/metagrad.hpp"
#include "ladapt/verify/oracles.hpp"

namespace ladapt {
namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

SlaveState make_slave(std::size_t index, double eta, const Vector& mean) {
  SlaveState s;
  s.index = index;
  s.eta = eta;
  s.mean = mean;
  s.unprojected = mean;
  s.gram = Matrix::Zero(mean.size(), mean.size());
  s.log_weight = std::log(grid_prior(index));
  return s;
}

TEST(Grid, RatesHalveAndPriorTelescopes) {
  const double B = 0.3;
  EXPECT_DOUBLE_EQ(grid_eta(0, B), 1.0 / 1.5);
  double partial = 0.0;
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_DOUBLE_EQ(grid_eta(i + 1, B), grid_eta(i, B) / 2.0);
    partial += grid_prior(i);
    EXPECT_NEAR(partial + grid_tail_mass(i + 1), 1.0, 1e-14);
  }
  EXPECT_DOUBLE_EQ(grid_tail_mass(0), 1.0);
}

TEST(Surrogate, NeverBelowMinusAQuarter) {
  harness::Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const Vector a = vec({rng.normal(), rng.normal()});
    const Vector b = vec({rng.normal(), rng.normal()});
    const Vector g = vec({rng.normal(), rng.normal()});
    ASSERT_GE(clipped_surrogate(a, b, g, rng.uniform() * 3.0), -0.25);
  }
}

TEST(ActiveSet, EmptyAtTheStart) {
  MetaGradState s(3, 2.0, 1.0);
  EXPECT_TRUE(s.active.empty());
  EXPECT_DOUBLE_EQ(metagrad_potential(s), 1.0);
}

TEST(ActiveSet, MatchesDirectWakeCondition) {
  harness::Rng rng(2);
  const double D = 2.0, B = 0.5;
  MetaGradState s(2, D, B);
  double W = 0.0, Bt = B;
  for (int t = 1; t <= 300; ++t) {
    const double scale = t == 150 ? 40.0 : 1.0;
    const Vector g = scale * vec({rng.normal(), rng.normal()});
    metagrad_round(s, Gradient(g));
    const double b = D * g.norm();
    const double prev = Bt;
    Bt = std::max(Bt, b);
    W += prev / Bt * b;
    for (std::size_t i = 0; i < 40; ++i) {
      const double eta = grid_eta(i, B);
      const bool woken = eta * (W + Bt) >= 1.0 - 1e-12;
      const bool admissible = eta <= 1.0 / (5.0 * Bt) * (1.0 + 1e-12);
      bool active = false;
      for (const SlaveState& slave : s.active) active = active || slave.index == i;
      ASSERT_EQ(active, woken && admissible) << "t=" << t << " i=" << i;
    }
  }
}

TEST(SlaveUpdate, ZeroGradientChangesNothing) {
  SlaveState s = make_slave(2, 0.1, vec({0.3, -0.1}));
  const SlaveState before = s;
  slave_update(s, vec({0.0, 0.0}), vec({0.0, 0.0}), 2.0);
  EXPECT_EQ(s.mean, before.mean);
  EXPECT_EQ(s.unprojected, before.unprojected);
  EXPECT_EQ(s.gram, before.gram);
  EXPECT_EQ(s.log_weight, before.log_weight);
}

TEST(SlaveUpdate, HandEvaluatedOneDimensionalStep) {
  SlaveState s = make_slave(0, 0.1, vec({0.0}));
  slave_update(s, vec({0.0}), vec({1.0}), 2.0);
  EXPECT_NEAR(s.unprojected[0], -0.1 / 0.27, 1e-15);
  EXPECT_NEAR(s.mean[0], -0.37037037037037035, 1e-15);
  EXPECT_DOUBLE_EQ(s.gram(0, 0), 1.0);
}

TEST(SlaveUpdate, FarStepLandsOnTheSphere) {
  SlaveState s = make_slave(0, 0.2, vec({0.5, 0.0}));
  slave_update(s, vec({0.9, 0.0}), vec({-3.0, -1.0}), 2.0);
  EXPECT_GT(s.unprojected.norm(), 1.0);
  EXPECT_NEAR(s.mean.norm(), 1.0, 1e-8);
  const Vector reference = verify::brute_force_projection(2.0, s.gram, s.unprojected, s.eta);
  EXPECT_LE((s.mean - reference).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Master, OneSlaveIsCopied) {
  MetaGradState s(2, 2.0, 1.0);
  s.active.push_back(make_slave(3, grid_eta(3, 1.0), vec({0.25, -0.5})));
  EXPECT_EQ(master_predict(s), vec({0.25, -0.5}));
}

TEST(Master, SymmetricPairCancels) {
  MetaGradState s(2, 2.0, 1.0);
  SlaveState a = make_slave(0, 0.2, vec({0.4, 0.1}));
  SlaveState b = make_slave(1, 0.1, vec({-0.4, -0.1}));
  a.log_weight = 0.0;
  b.log_weight = std::log(2.0);
  s.active = {a, b};
  EXPECT_LE(master_predict(s).cwiseAbs().maxCoeff(), 1e-16);
}

TEST(Master, MatchesDirectFormula) {
  harness::Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    MetaGradState s(3, 2.0, 1.0);
    for (std::size_t j = 0; j < 3; ++j) {
      SlaveState slave = make_slave(j + 2, grid_eta(j + 2, 1.0),
                                    0.3 * vec({rng.normal(), rng.normal(), rng.normal()}));
      slave.log_weight = rng.uniform(-20.0, 2.0);
      s.active.push_back(slave);
    }
    ASSERT_LE((master_predict(s) - verify::direct_master(s)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(MetaGradRound, ZeroGradientsKeepTheOrigin) {
  MetaGradC learner(4, 2.0, 1.0);
  for (int t = 0; t < 100; ++t) learner.round(Gradient(Vector::Zero(4)));
  EXPECT_EQ(learner.prediction(), Vector::Zero(4));
  EXPECT_TRUE(learner.state().active.empty());
  EXPECT_DOUBLE_EQ(learner.potential(), grid_tail_mass(0));
}

TEST(MetaGradRound, SingleJumpClipsOnceAndStaysInTheBall) {
  harness::Rng rng(4);
  MetaGradC learner(2, 2.0, 1.0);
  int clipped_rounds = 0;
  for (int t = 1; t <= 400; ++t) {
    const double scale = t >= 200 ? 100.0 : 1.0;
    // Unit gradients: b_t = D |g| = 2 before the jump, 200 after.
    const double angle = rng.uniform(0.0, 2.0 * M_PI);
    learner.round(Gradient(scale * vec({std::cos(angle), std::sin(angle)})));
    if (learner.state().scale.clip_ratio() < 1.0) ++clipped_rounds;
    for (const SlaveState& s : learner.state().active) ASSERT_LE(s.mean.norm(), 1.0 + 1e-10);
    ASSERT_LE(learner.prediction().norm(), 1.0 + 1e-10);
    ASSERT_LE(learner.potential(), 1.0 + 1e-9);
  }
  // Once at t = 1 (b = 2 > B = 1) and once at the jump.
  EXPECT_EQ(clipped_rounds, 2);
}

TEST(MetaGradRound, SlaveCountStaysLogarithmic) {
  harness::Rng rng(5);
  MetaGradC learner(3, 1.0, 0.01);
  for (int t = 1; t <= 3000; ++t) {
    learner.round(Gradient(vec({rng.normal() + 0.3, rng.normal(), rng.normal()})));
    ASSERT_LE(learner.state().active.size(),
              static_cast<std::size_t>(std::floor(std::log2(t + 1.0))));
  }
  EXPECT_GT(learner.state().active.size(), 3u);
}

TEST(MetaGradRound, LearnsAFixedLinearLoss) {
  MetaGradC learner(2, 2.0, 1.0);
  for (int t = 0; t < 2000; ++t) learner.round(Gradient(vec({0.6, -0.8})));
  EXPECT_LE((learner.prediction() - vec({-0.6, 0.8})).norm(), 0.05);
}

TEST(MetaGradRound, RejectsWrongDimension) {
  MetaGradC learner(2, 2.0, 1.0);
  EXPECT_THROW(learner.round(Gradient(vec({1.0, 2.0, 3.0}))), InvalidInput);
  EXPECT_THROW(MetaGradC(0, 2.0, 1.0), InvalidInput);
  EXPECT_THROW(MetaGradC(2, -1.0, 1.0), InvalidInput);
}

}  // namespace
}  // namespace ladapt
