#include <gtest/gtest.h>

#include <cmath>

#include "tsol/learners.hpp"

using namespace tsol;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

template <class Step>
std::vector<double> frequencies(int n, int draws, Step step) {
  std::vector<double> f(n, 0.0);
  for (int s = 0; s < draws; ++s) f[step()] += 1.0 / draws;
  return f;
}

}  // namespace

TEST(Thompson, ZeroScaleIsFollowTheLeader) {
  GpSampler prior(KernelSpec::diagonal_white(2.0), ActionSpace::finite(3));
  Rng rng(1);
  for (int k = 0; k < 20; ++k) EXPECT_EQ(thompson_step(vec({0.0, 2.0, 1.0}), 5, 5, prior, rng, 0.0), 1);
  EXPECT_THROW(thompson_step(vec({0, 0, 0}), 0, 5, prior, rng), InvalidInput);
  EXPECT_THROW(thompson_step(vec({0, 0, 0}), 6, 5, prior, rng), InvalidInput);
}

TEST(Thompson, GaussianTailOracle) {
  GpSampler prior(KernelSpec::diagonal_white(2.0), ActionSpace::finite(2));
  Rng rng(2);
  const auto f = frequencies(2, 10000, [&] { return thompson_step(vec({10.0, 0.0}), 7, 7, prior, rng); });
  EXPECT_GE(f[0], 0.999);  // Phi(5) = 0.9999997133484281
  const auto g = frequencies(2, 10000, [&] { return thompson_step(vec({0.0, 0.0}), 7, 7, prior, rng); });
  EXPECT_NEAR(g[0], 0.5, 0.02);
}

TEST(Ftpl, ClosedFormFrequency) {
  GpSampler prior(KernelSpec::diagonal_white(1.0), ActionSpace::finite(2));
  Rng rng(3);
  const auto f = frequencies(2, 10000, [&] { return ftpl_step(vec({1.0, 0.0}), 1.0, prior, rng); });
  EXPECT_NEAR(f[0], 0.7602499389065233, 0.02);
  EXPECT_EQ(ftpl_step(vec({0.0, 3.0}), 0.0, prior, rng), 1);
  EXPECT_THROW(ftpl_step(vec({0.0, 3.0}), -1.0, prior, rng), InvalidInput);
}

TEST(Ftpl, CoincidesWithThompsonAtMatchingRate) {
  GpSampler prior(KernelSpec::matern_half(1.0, 0.2), ActionSpace::cube_grid(1, 32));
  Rng seq(4);
  Vector cum = Vector::Zero(32);
  const int horizon = 30;
  for (int t = 1; t <= horizon; ++t) {
    Rng a(100 + t), b(100 + t);
    EXPECT_EQ(thompson_step(cum, t, horizon, prior, a), ftpl_step(cum, std::sqrt(horizon - t + 1.0), prior, b));
    cum += prior.sample(1.0, seq);
  }
}

TEST(ExpWeights, Probabilities) {
  const auto p = exp_weights_probabilities(vec({std::log(2.0), 0.0}), 1.0);
  EXPECT_NEAR(p[0], 2.0 / 3.0, 1e-15);
  const auto u = exp_weights_probabilities(vec({5.0, -3.0, 1.0}), 0.0);
  for (double x : u) EXPECT_DOUBLE_EQ(x, 1.0 / 3.0);
  const auto big = exp_weights_probabilities(vec({1e6, 0.0}), 1.0);
  EXPECT_EQ(big[0], 1.0);
  EXPECT_THROW(exp_weights_probabilities(vec({std::nan(""), 0.0}), 1.0), NumericalError);
  Rng rng(5);
  const auto f = frequencies(3, 10000, [&] { return exp_weights_step(vec({2.0, 2.0, 2.0}), 0.7, rng); });
  for (double x : f) EXPECT_NEAR(x, 1.0 / 3.0, 0.02);
  EXPECT_NEAR(default_exp_weights_eta(10, 1000), std::sqrt(8.0 * std::log(10.0) / 1000.0), 1e-15);
}

TEST(Uniform, Frequencies) {
  Rng rng(6);
  EXPECT_EQ(uniform_step(1, rng), 0);
  for (int n : {4, 8}) {
    const auto f = frequencies(n, 10000, [&] { return uniform_step(n, rng); });
    for (double x : f) EXPECT_NEAR(x, 1.0 / n, 0.02);
  }
}

TEST(LearnerClass, CompatibilityAndDefaults) {
  EXPECT_THROW(Learner(ExpWeightsSpec{}, ActionSpace::cube_grid(1, 8), 10), InvalidInput);
  EXPECT_THROW(Learner(ThompsonSpec{KernelSpec::diagonal_white(1.0)}, ActionSpace::finite(2), 0), InvalidInput);
  const Learner l(ExpWeightsSpec{}, ActionSpace::finite(10), 1000);
  EXPECT_NEAR(*std::get<ExpWeightsSpec>(l.spec()).eta, default_exp_weights_eta(10, 1000), 1e-15);
  EXPECT_TRUE(l.compatible_with(ActionSpace::finite(10)));
  EXPECT_FALSE(l.compatible_with(ActionSpace::finite(9)));
}

TEST(LearnerClass, StrategyViewSumsToOne) {
  const auto space = ActionSpace::finite(4);
  const Learner l(ThompsonSpec{KernelSpec::diagonal_white(2.0)}, space, 10);
  Vector cum = vec({1.0, 0.0, -1.0, 0.5});
  RoundContext ctx;
  ctx.t = 3;
  ctx.horizon = 10;
  ctx.space = &space;
  ctx.cumulative = &cum;
  Rng rng(7);
  const auto p = l.action_probabilities(ctx, rng);
  double total = 0;
  for (double x : p) total += x;
  EXPECT_NEAR(total, 1.0, 1e-12);
}
