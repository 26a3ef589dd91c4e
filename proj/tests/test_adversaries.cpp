#include <gtest/gtest.h>

#include <cmath>

#include "tsol/adversaries.hpp"
#include "tsol/learners.hpp"
#include "tsol/stats.hpp"

using namespace tsol;

TEST(Rademacher, SignsAndMoments) {
  Rng rng(1);
  const auto one = ActionSpace::finite(1);
  double plus = 0;
  for (int s = 0; s < 10000; ++s) {
    const double v = rademacher_round(one, rng)[0];
    ASSERT_TRUE(v == 1.0 || v == -1.0);
    plus += (v > 0) / 10000.0;
  }
  EXPECT_NEAR(plus, 0.5, 0.02);

  const auto three = ActionSpace::finite(3);
  Vector mean = Vector::Zero(3);
  double cross = 0;
  for (int s = 0; s < 10000; ++s) {
    const auto y = rademacher_round(three, rng);
    mean += y.values / 10000.0;
    cross += y[0] * y[1] / 10000.0;
  }
  EXPECT_LE(mean.cwiseAbs().maxCoeff(), 0.03);
  EXPECT_NEAR(cross, 0.0, 0.03);
  EXPECT_THROW(rademacher_round(ActionSpace::cube_grid(1, 4), rng), InvalidInput);
}

TEST(Center, KnownShiftIsRemovedExactly) {
  Rng rng(2);
  const auto space = ActionSpace::finite(4);
  std::vector<RewardFunction> base, shifted;
  for (int s = 0; s < 50; ++s) {
    base.push_back(rademacher_round(space, rng));
    shifted.emplace_back((base.back().values.array() + 0.75).matrix());
  }
  const auto back = center_adversary(shifted, 0.75);
  for (std::size_t i = 0; i < base.size(); ++i) EXPECT_EQ(back[i].values, base[i].values);
}

TEST(Center, EstimatedMeanIsNearZero) {
  Rng rng(3);
  const auto space = ActionSpace::finite(5);
  std::vector<RewardFunction> batch;
  for (int s = 0; s < 4000; ++s) batch.emplace_back((rademacher_round(space, rng).values.array() + 2.0).matrix());
  const auto c = center_adversary(batch);
  for (int i = 0; i < 5; ++i) {
    RunningStats st;
    for (const auto& y : c) st.add(y[i]);
    EXPECT_LE(std::abs(st.mean()), 3.0 * st.stderr_of_mean() + 1e-12);
  }
  EXPECT_THROW(center_adversary({}), InvalidInput);
}

TEST(Center, RegretIsUnchangedByCentering) {
  const auto space = ActionSpace::finite(3);
  Rng rng(4);
  std::vector<RewardFunction> seq;
  for (int t = 0; t < 40; ++t) seq.emplace_back((rademacher_round(space, rng).values.array() + 0.5 * t).matrix());
  const Learner l(ThompsonSpec{KernelSpec::diagonal_white(2.0)}, space, 40);
  const Adversary raw(AdversarySpec{FixedSpec{seq}}, space, 40);
  const Adversary cen(centered(AdversarySpec{FixedSpec{seq}}), space, 40);
  const auto a = play_game(l, raw, space, 40, 11);
  const auto b = play_game(l, cen, space, 40, 11);
  EXPECT_EQ(a.actions, b.actions);
  EXPECT_NEAR(realized_regret(a), realized_regret(b), 1e-9);
}

TEST(Zigzag, ConstantWhenLambdaIsZero) {
  Rng rng(5);
  const auto space = ActionSpace::cube_grid(1, 16);
  const auto y = lipschitz_zigzag_round(space, 0.7, 0.0, rng);
  EXPECT_EQ(y.values.maxCoeff(), y.values.minCoeff());
  EXPECT_EQ(std::abs(y[0]), 0.7);
}

TEST(Zigzag, ClassAuditAndCentring) {
  Rng rng(6);
  const auto space = ActionSpace::cube_grid(1, 64);
  Vector mean = Vector::Zero(64);
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) {
    const auto y = lipschitz_zigzag_round(space, 1.0, 1.0, rng);
    ASSERT_LE(y.sup_norm(), 1.0);
    for (auto [i, j] : space.neighbor_pairs()) ASSERT_LE(std::abs(y[i] - y[j]), 1.0 / 64 + 1e-12);
    mean += y.values / draws;
  }
  EXPECT_LE(mean.cwiseAbs().maxCoeff(), 0.05);
}

TEST(Zigzag, ManyCellsInHigherDimension) {
  Rng rng(7);
  const auto space = ActionSpace::cube_grid(2, 16);
  for (int s = 0; s < 200; ++s) {
    const auto y = lipschitz_zigzag_round(space, 0.25, 4.0, rng);
    ASSERT_LE(y.sup_norm(), 0.25 + 1e-12);
    ASSERT_LE(grid_lipschitz_constant(y, space), 4.0 + 1e-12);
  }
  EXPECT_THROW(lipschitz_zigzag_round(space, 0.01, 10.0, rng), InvalidInput);  // spacing 1/16 > 2e-3
}

TEST(AdaptiveGreedy, Examples) {
  const Vector zero = Vector::Zero(2);
  const auto a = adaptive_greedy_round({0.5, 0.5}, zero, 2.0);
  EXPECT_EQ(a[0], -2.0);
  EXPECT_EQ(a[1], 2.0);
  const auto b = adaptive_greedy_round({0.9, 0.1}, zero, 1.0);
  EXPECT_EQ(b[0], -1.0);
  EXPECT_EQ(b[1], 1.0);
  EXPECT_THROW(adaptive_greedy_round({0.5, 0.6}, zero, 1.0), InvalidInput);
}

TEST(AdaptiveGreedy, HurtsUniformAtLeastAsMuchAsRademacher) {
  const auto space = ActionSpace::finite(2);
  const int horizon = 1000, reps = 100;
  const Learner l(UniformSpec{}, space, horizon);
  const Adversary greedy(AdversarySpec{AdaptiveGreedySpec{1.0}}, space, horizon);
  const Adversary rad(AdversarySpec{RademacherSpec{}}, space, horizon);
  RunningStats g, r;
  for (int k = 0; k < reps; ++k) {
    g.add(realized_regret(play_game(l, greedy, space, horizon, 1000 + k)));
    r.add(realized_regret(play_game(l, rad, space, horizon, 1000 + k)));
  }
  EXPECT_GE(g.mean(), r.mean());
}

TEST(AdversaryClass, Validation) {
  EXPECT_THROW(Adversary(AdversarySpec{RademacherSpec{}}, ActionSpace::cube_grid(1, 4), 5), InvalidInput);
  EXPECT_THROW(Adversary(AdversarySpec{ZigzagSpec{1.0, 1.0}}, ActionSpace::finite(4), 5), InvalidInput);
  EXPECT_THROW(Adversary(AdversarySpec{FixedSpec{{RewardFunction::zeros(2)}}}, ActionSpace::finite(2), 2), InvalidInput);
  EXPECT_EQ(*Adversary::sup_bound(AdversarySpec{ZigzagSpec{0.5, 1.0}}), 0.5);
  EXPECT_EQ(*Adversary::sup_bound(centered(AdversarySpec{RademacherSpec{}})), 1.0);
}
