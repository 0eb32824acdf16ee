#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "ppgkit/diagnostics.hpp"

using namespace ppgkit;
using namespace ppgkit::testing;

namespace {

bool has_code(const ValidationReport& report, ErrorCode code) {
  for (const auto& v : report.violations) {
    if (v.code == code) return true;
  }
  return false;
}

}  // namespace

TEST(Validate, AcceptsWellFormedMdp) {
  EXPECT_TRUE(validate_mdp(two_state()).ok());
  EXPECT_TRUE(validate_mdp(bandit()).ok());
}

TEST(Validate, RewardAboveOneIsReported) {
  std::vector<double> p{0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  std::vector<double> r(8, 0.5);
  r[3] = 1.5;
  TabularMdp mdp(2, 2, p, r, 0.9, vec({0.5, 0.5}));
  const ValidationReport report = validate_mdp(mdp);
  ASSERT_FALSE(report.ok());
  EXPECT_TRUE(has_code(report, ErrorCode::RewardOutOfRange));
  EXPECT_EQ(report.violations.front().field, "r");
  EXPECT_DOUBLE_EQ(report.violations.front().value, 1.5);
}

TEST(Validate, ZeroInitialMassIsReported) {
  std::vector<double> p(8, 0.5);
  TabularMdp mdp(2, 2, p, std::vector<double>(8, 0.0), 0.9, vec({1.0, 0.0}));
  EXPECT_TRUE(has_code(validate_mdp(mdp), ErrorCode::InitialDistributionNotTraversal));
}

TEST(Validate, RowSumAndGamma) {
  std::vector<double> p(8, 0.5);
  p[0] = 0.4;
  TabularMdp mdp(2, 2, p, std::vector<double>(8, 0.0), 1.0, vec({0.5, 0.5}));
  const ValidationReport report = validate_mdp(mdp);
  EXPECT_TRUE(has_code(report, ErrorCode::RowNotStochastic));
  EXPECT_TRUE(has_code(report, ErrorCode::BadGamma));
  EXPECT_NE(report.describe().find("RowNotStochastic"), std::string::npos);
}

TEST(Validate, ShapeMismatchThrows) {
  EXPECT_THROW(TabularMdp(2, 2, std::vector<double>(7, 0.0), std::vector<double>(8, 0.0), 0.9, vec({0.5, 0.5})),
               Error);
  EXPECT_THROW(TabularMdp(2, 2, std::vector<double>(8, 0.5), std::vector<double>(8, 0.0), 0.9, vec({1.0})), Error);
}

TEST(Validate, PolicyRowsMustBeDistributions) {
  const TabularMdp mdp = bandit();
  EXPECT_NO_THROW(validate_policy(mdp, row_policy({0.3, 0.7})));
  try {
    validate_policy(mdp, row_policy({0.3, 0.6}));
    FAIL() << "expected InvalidPolicy";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidPolicy);
  }
  EXPECT_THROW(validate_policy(mdp, row_policy({1.2, -0.2})), Error);
  EXPECT_THROW(validate_policy(mdp, Policy::uniform(2, 2)), Error);
}

TEST(Evaluate, ZeroRewardsGiveZeroValues) {
  const TabularMdp mdp = zero_reward(3, 2);
  const ValueBundle b = policy_evaluate(mdp, Policy::uniform(3, 2));
  EXPECT_EQ(b.v.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(b.q.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(b.adv.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Evaluate, BanditClosedForm) {
  const ValueBundle b = policy_evaluate(bandit(), row_policy({1.0, 0.0}));
  EXPECT_NEAR(b.v(0), 7.5, 1e-12);
  EXPECT_NEAR(b.q(0, 0), 7.5, 1e-12);
  EXPECT_NEAR(b.q(0, 1), 7.0, 1e-12);
  EXPECT_NEAR(b.adv(0, 0), 0.0, 1e-12);
  EXPECT_NEAR(b.adv(0, 1), -0.5, 1e-12);
  EXPECT_NEAR(b.visitation(0), 1.0, 1e-12);
}

TEST(Evaluate, ZeroDiscountVisitationIsMu) {
  const TabularMdp mdp = two_state(0.0);
  const ValueBundle b = policy_evaluate(mdp, Policy::uniform(2, 2));
  EXPECT_NEAR((b.visitation - mdp.mu()).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(Evaluate, BundleInvariants) {
  const TabularMdp mdp = two_state(0.95);
  Matrix probs(2, 2);
  probs << 0.2, 0.8, 0.6, 0.4;
  const Policy pi(probs);
  const ValueBundle b = policy_evaluate(mdp, pi);
  for (int s = 0; s < 2; ++s) {
    EXPECT_NEAR(pi.probs().row(s).dot(b.q.row(s)), b.v(s), 1e-9);
    for (int a = 0; a < 2; ++a) EXPECT_EQ(b.adv(s, a), b.q(s, a) - b.v(s));
  }
  EXPECT_GE(b.v.minCoeff(), 0.0);
  EXPECT_LE(b.q.maxCoeff(), mdp.value_scale());
  EXPECT_NEAR(b.visitation.sum(), 1.0, 1e-9);
  EXPECT_GE(b.visitation.minCoeff(), (1.0 - mdp.gamma()) * mdp.mu_tilde() - 1e-15);
  // Visitation from mu agrees with the general rho entry point.
  EXPECT_NEAR((visitation_measure(mdp, pi, mdp.mu()) - b.visitation).cwiseAbs().maxCoeff(), 0.0, 1e-14);
}

TEST(ValueUnder, Examples) {
  EXPECT_DOUBLE_EQ(value_under(vec({0.0, 1.0}), vec({4.0, 6.0})), 6.0);
  EXPECT_DOUBLE_EQ(value_under(vec({0.5, 0.5}), vec({4.0, 6.0})), 5.0);
  const TabularMdp mdp = bandit();
  EXPECT_NEAR(value_under(mdp.mu(), policy_evaluate(mdp, row_policy({1.0, 0.0})).v), 7.5, 1e-12);
  EXPECT_THROW(value_under(vec({1.0}), vec({4.0, 6.0})), Error);
}

TEST(Bellman, BanditOneStep) {
  const BellmanBackup out = bellman_backup(bandit(), Vector::Zero(1));
  EXPECT_DOUBLE_EQ(out.v(0), 0.75);
  EXPECT_EQ(out.greedy[0], ActionSet{0});
}

TEST(Bellman, ZeroRewardKeepsAllActions) {
  const BellmanBackup out = bellman_backup(zero_reward(2, 3), Vector::Zero(2));
  EXPECT_EQ(out.v.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(out.greedy[0], (ActionSet{0, 1, 2}));
}

TEST(Bellman, OptimalValuesAreAFixedPoint) {
  const TabularMdp mdp = two_state();
  const OptimalSolution opt = solve_optimal(mdp);
  EXPECT_LE((bellman_backup(mdp, opt.v_star).v - opt.v_star).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Argmax, ToleranceScalesWithHorizon) {
  EXPECT_DOUBLE_EQ(argmax_tolerance(0.0), 1e-9);
  EXPECT_NEAR(argmax_tolerance(0.99), 1e-7, 1e-20);
  EXPECT_EQ(argmax_set(vec({1.0, 1.0 - 5e-10, 0.5}), 1e-9), (ActionSet{0, 1}));
  EXPECT_EQ(argmax_set(vec({1.0, 1.0 - 5e-9, 0.5}), 1e-9), (ActionSet{0}));
}

TEST(MdpEquality, ComparesEveryField) {
  EXPECT_TRUE(two_state() == two_state());
  EXPECT_FALSE(two_state(0.9) == two_state(0.8));
  EXPECT_FALSE(two_state() == bandit());
}
