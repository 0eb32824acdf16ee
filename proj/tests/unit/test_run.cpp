#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "ppgkit/run.hpp"

using namespace ppgkit;
using namespace ppgkit::testing;

TEST(Run, OptimalStartStopsImmediately) {
  const TabularMdp mdp = bandit();
  RunOptions options;
  options.initial_policy = row_policy({1.0, 0.0});
  const RunTrace t = run(mdp, UpdateRule::ppg(), StepSchedule::constant(1.0), 100, true, solve_optimal(mdp), options);
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_EQ(t.terminated_reason, TerminationReason::ReachedOptimal);
  EXPECT_EQ(t.first_optimal(), 0);
}

TEST(Run, BanditPpgTerminatesAtFirstStep) {
  const RunTrace t = run(bandit(), UpdateRule::ppg(), StepSchedule::constant(1.0), 100, true);
  ASSERT_EQ(t.records.size(), 2u);
  EXPECT_EQ(t.first_optimal(), 1);
  EXPECT_EQ(t.terminated_reason, TerminationReason::ReachedOptimal);
  EXPECT_NEAR(t.records[0].gap_mu, 2.5, 1e-12);
  EXPECT_NEAR(t.records[0].f_s(0), 0.25, 1e-12);
  EXPECT_EQ(t.records[0].support_sizes, std::vector<int>{1});
  EXPECT_EQ(t.terminal_policy.probs(), Matrix(row_policy({1.0, 0.0}).probs()));
}

TEST(Run, MaxIterationsIsRespected) {
  const RunTrace t = run(two_state(), UpdateRule::ppg(), StepSchedule::constant(1e-4), 7, false);
  EXPECT_EQ(t.records.size(), 8u);
  EXPECT_EQ(t.terminated_reason, TerminationReason::MaxIterations);
  for (std::size_t k = 0; k < t.records.size(); ++k) EXPECT_EQ(t.records[k].k, static_cast<int>(k));
}

TEST(Run, PiWithinItsBound) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const TabularMdp mdp = generate(RandomSpec{seed, 6, 4, 0.95, 0.0});
    const OptimalSolution opt = solve_optimal(mdp);
    K0Constants c;
    c.gamma = mdp.gamma();
    c.delta = opt.delta;
    const auto k0 = finite_k0(FiniteRule::PI, c);
    const RunTrace t = run(mdp, UpdateRule::pi(), StepSchedule{}, static_cast<int>(k0), true, opt);
    ASSERT_TRUE(t.first_optimal().has_value());
    EXPECT_LE(*t.first_optimal(), k0);
  }
}

TEST(Run, MonotoneImprovement) {
  const TabularMdp mdp = generate(RandomSpec{3, 5, 3, 0.9, 0.3});
  const OptimalSolution opt = solve_optimal(mdp);
  for (const UpdateRule& rule : {UpdateRule::ppg(), UpdateRule::pqa(), UpdateRule::pi()}) {
    for (double eta : {0.01, 1.0, 100.0}) {
      const RunTrace t = run(mdp, rule, StepSchedule::constant(eta), 50, true, opt);
      for (std::size_t k = 1; k < t.records.size(); ++k) {
        EXPECT_GE(t.records[k].value_mu, t.records[k - 1].value_mu - 1e-9);
        EXPECT_GE(t.records[k].gap_mu, -1e-9);
      }
    }
  }
}

TEST(Run, ViTracksIterateError) {
  const TabularMdp mdp = bandit();
  const RunTrace t = run(mdp, UpdateRule::vi(), StepSchedule{}, 5, false);
  ASSERT_EQ(t.records.size(), 6u);
  EXPECT_NEAR(t.records[0].gap_inf, 7.5, 1e-12);
  EXPECT_NEAR(t.records[1].gap_inf, 7.5 - 0.75, 1e-12);
  EXPECT_TRUE(t.records[0].is_optimal);
}

TEST(Run, HomotopicFromOptimumLosesMass) {
  const TabularMdp mdp = bandit();
  RunOptions options;
  options.initial_policy = row_policy({1.0, 0.0});
  const RunTrace t =
      run(mdp, UpdateRule::homotopic_pqa(1.0 / 0.9), StepSchedule::constant(0.1), 1, false, solve_optimal(mdp), options);
  ASSERT_EQ(t.records.size(), 2u);
  EXPECT_TRUE(t.records[0].is_optimal);
  EXPECT_FALSE(t.records[1].is_optimal);
}

TEST(Run, NumericalFloorWhenStuck) {
  // Homotopic PQA with a strong pull toward a sub-optimal anchor settles away from the optimum.
  const TabularMdp mdp = bandit();
  const RunTrace t = run(mdp, UpdateRule::homotopic_pqa(5.0, row_policy({0.0, 1.0})), StepSchedule::constant(0.01),
                         100000, true);
  EXPECT_EQ(t.terminated_reason, TerminationReason::NumericalFloor);
  EXPECT_LT(t.records.size(), 100000u);
}

TEST(Run, RejectsBadArguments) {
  EXPECT_THROW(run(bandit(), UpdateRule::ppg(), StepSchedule::constant(-1.0), 10, true), Error);
  EXPECT_THROW(run(bandit(), UpdateRule::ppg(), StepSchedule::constant(1.0), -1, true), Error);
}
