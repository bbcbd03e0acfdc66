#include <gtest/gtest.h>

#include "ladapt/verify/suites.hpp"

// Reduced-size runs of the randomized suites; the acceptance binary runs
// them at full size.
namespace ladapt::verify {
namespace {

void expect_pass(const CheckResult& r) { EXPECT_TRUE(r.passed()) << r.name << ": " << r.detail; }

TEST(Suites, SquintPotential) { expect_pass(check_squint_potential(6, 1)); }
TEST(Suites, SquintWeights) { expect_pass(check_squint_weights(40, 2)); }
TEST(Suites, MetaGradPotential) { expect_pass(check_metagrad_potential(8, 3)); }
TEST(Suites, SlaveCount) { expect_pass(check_slave_count(8, 4)); }
TEST(Suites, ClippingIdentity) { expect_pass(check_clipping_identity(6, 5)); }
TEST(Suites, LogWeights) { expect_pass(check_log_weights(6, 6)); }
TEST(Suites, MasterFormula) { expect_pass(check_master_formula(6, 7)); }
TEST(Suites, Projection) { expect_pass(check_projection(80, 8)); }
TEST(Suites, NewtonBisection) { expect_pass(check_newton_bisection(80, 9)); }

TEST(Suites, UnknownSuiteIsRejected) {
  EXPECT_THROW(run_suite("nope", 1), std::invalid_argument);
  EXPECT_EQ(suite_names().size(), 4u);
}

}  // namespace
}  // namespace ladapt::verify
