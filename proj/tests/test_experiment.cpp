#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tsol/experiment.hpp"

using namespace tsol;

namespace {

ExperimentConfig parse(const std::string& text) { return parse_experiment(RawConfig::parse(text, experiment_keys())); }

int error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, ParsesFlatKeys) {
  const auto c = parse(
      "# comment\n"
      "space.kind = cube\n"
      "space.d = 2\n"
      "space.points_per_axis = 8   # trailing\n"
      "learner.kind = thompson\n"
      "learner.prior.kind = matern_half\n"
      "learner.prior.lengthscale = 0.5\n"
      "adversary.kind = zigzag\n"
      "adversary.beta = 0.5\n"
      "adversary.lambda = 2\n"
      "game.horizon = 12\n"
      "game.seed = 18446744073709551615\n");
  EXPECT_EQ(c.space.kind, "cube");
  EXPECT_EQ(c.space.d, 2);
  EXPECT_EQ(c.space.points_per_axis, 8);
  EXPECT_EQ(c.learner.prior.family, KernelFamily::kMaternHalf);
  EXPECT_EQ(c.learner.prior.lengthscale, 0.5);
  EXPECT_EQ(c.adversary.lambda, 2.0);
  EXPECT_EQ(c.horizon, 12);
  EXPECT_EQ(c.seed, 18446744073709551615ULL);
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("space.kind = finite\nlearner.kind = bogus\n"), 2);
  EXPECT_EQ(error_line("\n\nnot a pair\n"), 3);
  EXPECT_EQ(error_line("game.horizon = 10\ngame.horizon = 11\n"), 2);
  EXPECT_EQ(error_line("space.kind = finite\nunknown.key = 1\n"), 2);
  EXPECT_EQ(error_line("game.horizon = ten\n"), 1);
  EXPECT_EQ(error_line("game.replications = 0\n"), 1);
  EXPECT_EQ(error_line("learner.kind = ftpl\nlearner.eta = 0\n"), 2);
  EXPECT_EQ(error_line("learner.kind = ftpl\nlearner.eta = -1\n"), 2);
  EXPECT_EQ(error_line("space.kind = cube\nlearner.kind = exp_weights\n"), 2);
  EXPECT_EQ(error_line("space.kind = finite\nadversary.kind = zigzag\n"), 2);
  EXPECT_EQ(error_line("space.kind = cube\n\nadversary.kind = rademacher\n"), 3);
  EXPECT_EQ(error_line("space.n = 2\ngame.horizon = 3\nadversary.kind = fixed\nadversary.rewards = 1,0;0,1\n"), 4);
}

TEST(Config, EtaSqrtHorizon) {
  const auto c = parse("learner.kind = ftpl\nlearner.eta = sqrtT\ngame.horizon = 400\n");
  EXPECT_EQ(std::get<FtplSpec>(build_learner_spec(c)).eta, 20.0);
}

TEST(Simulation, ZeroAdversaryHasZeroRegret) {
  auto c = parse("space.n = 4\nadversary.kind = zero\ngame.horizon = 8\ngame.replications = 20\nanalysis.mc_samples = 500\n");
  const auto r = run_simulation(c);
  EXPECT_EQ(r.regret.value, 0.0);
  ASSERT_TRUE(r.prior_regret.has_value());
  EXPECT_GT(r.prior_regret->value, 0.0);
  EXPECT_TRUE(r.bound_satisfied.value_or(false));
}

TEST(Simulation, FiniteBoundReported) {
  auto c = parse("space.n = 10\ngame.horizon = 200\ngame.replications = 40\nanalysis.mc_samples = 200\n");
  const auto r = run_simulation(c);
  ASSERT_TRUE(r.bound.value.has_value());
  EXPECT_NEAR(*r.bound.value, regret_bound_finite(200, 10), 1e-10);
  EXPECT_TRUE(*r.bound_satisfied);
}

TEST(Simulation, ThreadCountDoesNotChangeResults) {
  auto c = parse("space.n = 6\ngame.horizon = 50\ngame.replications = 17\nanalysis.mc_samples = 100\n");
  const auto a = run_simulation(c, 1);
  const auto b = run_simulation(c, 4);
  ASSERT_EQ(a.replications.size(), b.replications.size());
  for (std::size_t i = 0; i < a.replications.size(); ++i) EXPECT_EQ(a.replications[i].regret, b.replications[i].regret);
}

TEST(Simulation, OutputsAreByteIdentical) {
  auto c = parse("space.n = 3\ngame.horizon = 30\ngame.replications = 1\ngame.seed = 5\nanalysis.mc_samples = 100\nanalysis.decompose = true\n");
  const auto dir = std::filesystem::temp_directory_path() / "tsol_sim_test";
  std::filesystem::remove_all(dir);
  write_simulation_outputs(run_simulation(c), dir / "a");
  write_simulation_outputs(run_simulation(c), dir / "b");
  for (const char* f : {"replications.csv", "summary.json", "trajectory.jsonl", "decomposition.json"})
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  EXPECT_EQ(slurp(dir / "a" / "replications.csv").rfind("replication,seed,regret\r\n", 0), 0u);
}

TEST(Sweep, SingleValueMatchesSimulation) {
  auto c = parse("space.n = 5\ngame.horizon = 40\ngame.replications = 30\nanalysis.mc_samples = 100\n");
  const auto rows = run_sweep(c, "T", {40});
  const auto sim = run_simulation(c);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].regret.value, sim.regret.value);
  EXPECT_EQ(rows[0].regret.std_error, sim.regret.std_error);
  EXPECT_THROW(run_sweep(c, "lambda", {1.0}), InvalidInput);
  EXPECT_THROW(run_sweep(c, "bogus", {1.0}), InvalidInput);
}

TEST(Sweep, RegretGrowsWithNumberOfExperts) {
  auto c = parse("space.n = 2\ngame.horizon = 400\ngame.replications = 200\nanalysis.mc_samples = 100\n");
  const auto rows = run_sweep(c, "N", {2, 10, 100});
  EXPECT_LE(rows[0].regret.value, rows[1].regret.value);
  EXPECT_LE(rows[1].regret.value, rows[2].regret.value);
}

TEST(Parallel, OrderedResultsAndErrors) {
  const auto v = parallel_map(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], static_cast<int>(i * i));
  EXPECT_THROW(parallel_map(10, 3,
                            [](std::size_t i) -> int {
                              if (i == 7) throw InvalidInput("boom");
                              return 0;
                            }),
               InvalidInput);
}
