#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "tsol/adversaries.hpp"
#include "tsol/analysis.hpp"
#include "tsol/core.hpp"
#include "tsol/experiment.hpp"
#include "tsol/gp.hpp"
#include "tsol/learners.hpp"
#include "tsol/stats.hpp"

namespace tsol {

// ---------------------------------------------------------------------------
// Brute-force reference estimators

// Mean regret of `learner` replayed `replications` times against a fixed
// reward sequence.
inline Estimate simulate_fixed_sequence_regret(const std::vector<RewardFunction>& rewards, const LearnerSpec& learner,
                                               const ActionSpace& space, int replications, std::uint64_t seed) {
  const int horizon = static_cast<int>(rewards.size());
  const Learner l(learner, space, horizon);
  const Adversary a(AdversarySpec{FixedSpec{rewards}}, space, horizon);
  RunningStats stats;
  for (int r = 0; r < replications; ++r) stats.add(realized_regret(play_game(l, a, space, horizon, replication_seed(seed, r))));
  return stats.estimate();
}

// E max_x sum_{s=1}^T gamma_s(x) with T independent draws per replicate.
inline Estimate prior_regret_direct_mc(const GpSampler& prior, int horizon, int n_samples, Rng& rng) {
  RunningStats stats;
  Vector total(prior.size()), draw(prior.size());
  for (int s = 0; s < n_samples; ++s) {
    total.setZero();
    for (int t = 0; t < horizon; ++t) {
      prior.sample_into(1.0, rng, draw);
      total += draw;
    }
    stats.add(total.maxCoeff());
  }
  return stats.estimate();
}

// Coordinate-wise mean of N(mu, sigma) conditioned on z <= alpha, by rejection.
inline std::vector<Estimate> truncated_normal_rejection_mean(const Vector& mu, const Matrix& sigma, const Vector& alpha,
                                                             int accepted, Rng& rng, long long max_proposals = 2'000'000'000LL) {
  const Eigen::Index d = mu.size();
  const Matrix chol = Eigen::LLT<Matrix>(sigma).matrixL();
  std::vector<RunningStats> stats(d);
  Vector z(d);
  int got = 0;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (long long p = 0; got < accepted; ++p) {
    if (p >= max_proposals) throw NumericalError("rejection sampler: acceptance rate too low");
    for (Eigen::Index i = 0; i < d; ++i) z(i) = normal(rng);
    const Vector x = mu + chol * z;
    if (((x - alpha).array() <= 0.0).all()) {
      for (Eigen::Index i = 0; i < d; ++i) stats[i].add(x(i));
      ++got;
    }
  }
  std::vector<Estimate> out;
  for (const auto& s : stats) out.push_back(s.estimate());
  return out;
}

inline std::vector<RewardFunction> rademacher_sequence(int n, int horizon, Rng& rng) {
  const ActionSpace space = ActionSpace::finite(n);
  std::vector<RewardFunction> out;
  for (int t = 0; t < horizon; ++t) out.push_back(rademacher_round(space, rng));
  return out;
}

// ---------------------------------------------------------------------------
// Check reports

struct Check {
  std::string name;
  bool passed = false;
  nlohmann::json details;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) arr.push_back({{"name", c.name}, {"passed", c.passed}, {"details", c.details}});
    return {{"suite", suite}, {"passed", passed()}, {"checks", arr}};
  }
};

struct VerifyOptions {
  std::uint64_t seed = 20240601;
  int mc_samples = 20000;
  int replications = 20000;
  int rejection_accepted = 200000;
};

inline SuiteReport verify_decomposition(const VerifyOptions& opt) {
  SuiteReport rep{"decomposition", {}};
  const KernelSpec prior = KernelSpec::diagonal_white(2.0);
  int index = 0;
  for (auto [n, horizon] : {std::pair{2, 3}, std::pair{5, 10}}) {
    const ActionSpace space = ActionSpace::finite(n);
    const GpSampler sampler(prior, space);
    Rng seq_rng = make_stream(opt.seed, {kAnalysisStream, 10, static_cast<std::uint64_t>(index)});
    const auto rewards = rademacher_sequence(n, horizon, seq_rng);
    Rng mc = make_stream(opt.seed, {kAnalysisStream, 11, static_cast<std::uint64_t>(index)});
    const auto dec = decompose_regret(rewards, sampler, ThompsonSpec{prior}, opt.mc_samples, mc);
    const Estimate implied = dec.implied_regret();
    const Estimate direct = simulate_fixed_sequence_regret(rewards, ThompsonSpec{prior}, space, opt.replications,
                                                           derive_seed(opt.seed, {kAnalysisStream, 12, static_cast<std::uint64_t>(index)}));
    const double tol = 3.0 * pooled_stderr(implied, direct);
    rep.checks.push_back({"identity N=" + std::to_string(n) + " T=" + std::to_string(horizon),
                          std::abs(implied.value - direct.value) <= tol,
                          {{"prior_plus_excess", implied.value},
                           {"prior_plus_excess_stderr", implied.std_error},
                           {"simulated_regret", direct.value},
                           {"simulated_regret_stderr", direct.std_error},
                           {"tolerance", tol}}});
    ++index;
  }
  {
    const int n = 5, horizon = 10;
    const ActionSpace space = ActionSpace::finite(n);
    const GpSampler sampler(prior, space);
    std::vector<RewardFunction> zeros(horizon, RewardFunction::zeros(n));
    Rng mc = make_stream(opt.seed, {kAnalysisStream, 13});
    const auto dec = decompose_regret(zeros, sampler, ThompsonSpec{prior}, opt.mc_samples, mc);
    bool bregman_zero = true;
    for (const auto& d : dec.per_round_bregman) bregman_zero = bregman_zero && d.value == 0.0 && d.std_error == 0.0;
    const Estimate neg_prior{-dec.prior_regret.value, dec.prior_regret.std_error, dec.prior_regret.n};
    const bool telescopes = agree_within(dec.total_excess, neg_prior);
    rep.checks.push_back({"zero adversary", bregman_zero && telescopes,
                          {{"sum_E_t", dec.total_excess.value},
                           {"sum_E_t_stderr", dec.total_excess.std_error},
                           {"prior_regret", dec.prior_regret.value},
                           {"sum_D_t", dec.total_bregman.value}}});
  }
  return rep;
}

inline SuiteReport verify_bregman(const VerifyOptions& opt) {
  SuiteReport rep{"bregman", {}};
  const KernelSpec prior = KernelSpec::diagonal_white(2.0);
  const ActionSpace space = ActionSpace::finite(2);
  const GpSampler sampler(prior, space);
  Rng seq_rng = make_stream(opt.seed, {kAnalysisStream, 20});
  std::vector<std::vector<RewardFunction>> sequences;
  for (int k = 0; k < 50; ++k) sequences.push_back(rademacher_sequence(2, 3, seq_rng));
  // Learner-favorable: every action earns the same, so nothing is lost.
  for (double c : {1.0, -1.0, 0.5}) sequences.push_back(std::vector<RewardFunction>(3, RewardFunction(Vector::Constant(2, c))));

  int holds = 0, negative = 0, nonneg_violations = 0;
  double worst_gap_in_se = -1e300;
  const int mc_n = std::max(2, opt.mc_samples / 4);
  for (std::size_t k = 0; k < sequences.size(); ++k) {
    Rng mc = make_stream(opt.seed, {kAnalysisStream, 21, k});
    const auto dec = decompose_regret(sequences[k], sampler, ThompsonSpec{prior}, mc_n, mc);
    const double tol = 3.0 * dec.excess_minus_bregman.std_error;
    if (dec.excess_minus_bregman.value <= tol) ++holds;
    if (dec.total_excess.value + 3.0 * dec.total_excess.std_error < 0.0) ++negative;
    for (const auto& d : dec.per_round_bregman)
      if (d.value < -3.0 * d.std_error) ++nonneg_violations;
    if (dec.excess_minus_bregman.std_error > 0)
      worst_gap_in_se = std::max(worst_gap_in_se, dec.excess_minus_bregman.value / dec.excess_minus_bregman.std_error);
  }
  const int total = static_cast<int>(sequences.size());
  rep.checks.push_back({"sum E_t <= sum D_t", holds == total,
                        {{"sequences", total}, {"holding", holds}, {"largest_gap_in_stderr", worst_gap_in_se}}});
  rep.checks.push_back({"negative excess present", negative > 0, {{"sequences_with_negative_excess", negative}}});
  rep.checks.push_back({"D_t nonnegative", nonneg_violations == 0, {{"violations", nonneg_violations}}});
  return rep;
}

inline SuiteReport verify_hessian(const VerifyOptions&) {
  SuiteReport rep{"hessian", {}};
  const ActionSpace grid = ActionSpace::cube_grid(1, 64);
  double worst = -1e300, worst_equality = 0.0;
  nlohmann::json rows = nlohmann::json::array();
  for (double beta : {0.5, 1.0, 2.0}) {
    for (double lambda : {0.5, 1.0, 2.0}) {
      const double kappa = beta / lambda;
      const auto r = check_hessian_condition(beta, lambda, KernelSpec::matern_half(1.0, kappa), grid.points());
      const double d_star = hessian_equality_distance(beta, lambda, kappa);
      const double at_star =
          lipschitz_envelope(beta, lambda, kappa, d_star) - r.analytic_C * (-std::expm1(-d_star / kappa));
      const double literal = 2.0 * beta / (lambda * kappa + beta);
      const double at_literal =
          lipschitz_envelope(beta, lambda, kappa, literal) - r.analytic_C * (-std::expm1(-literal / kappa));
      worst = std::max(worst, r.max_lhs_minus_rhs);
      worst_equality = std::max(worst_equality, std::abs(at_star));
      rows.push_back({{"beta", beta},
                      {"lambda", lambda},
                      {"kappa", kappa},
                      {"max_lhs_minus_rhs", r.max_lhs_minus_rhs},
                      {"empirical_C", r.empirical_C},
                      {"analytic_C", r.analytic_C},
                      {"alternative_C", r.alternative_C},
                      {"equality_distance", d_star},
                      {"residual_at_equality_distance", at_star},
                      {"residual_at_2beta_over_lambda_kappa_plus_beta", at_literal}});
    }
  }
  rep.checks.push_back({"grid inequality", worst <= 1e-10, {{"max_violation", worst}, {"cases", rows}}});
  rep.checks.push_back({"equality at kink", worst_equality <= 1e-9, {{"max_abs_residual", worst_equality}}});
  return rep;
}

inline SuiteReport verify_truncnorm(const VerifyOptions& opt) {
  SuiteReport rep{"truncnorm", {}};
  {
    Vector mu(1), alpha(1);
    Matrix s(1, 1);
    mu << 0.0;
    s << 1.0;
    alpha << 0.0;
    const double closed = -std::exp(-0.0) / std::sqrt(2.0 * std::numbers::pi) / 0.5;
    const double got = truncated_normal_mean(mu, s, alpha)(0);
    rep.checks.push_back({"univariate closed form", std::abs(got - closed) <= 1e-6, {{"formula", got}, {"closed_form", closed}}});
  }
  struct Case {
    Vector mu;
    Matrix sigma;
    Vector alpha;
  };
  std::vector<Case> cases;
  {
    Case c{Vector(1), Matrix(1, 1), Vector(1)};
    c.mu << 0.3;
    c.sigma << 2.0;
    c.alpha << 0.5;
    cases.push_back(c);
  }
  {
    Case c{Vector::Zero(2), Matrix(2, 2), Vector::Zero(2)};
    c.sigma << 1.0, 0.5, 0.5, 1.0;
    cases.push_back(c);
  }
  {
    Case c{Vector(3), Matrix(3, 3), Vector(3)};
    c.mu << 0.0, 0.2, -0.1;
    c.sigma << 1.0, 0.5, 0.3, 0.5, 1.0, 0.4, 0.3, 0.4, 1.0;
    c.alpha << 0.0, 0.5, 1.0;
    cases.push_back(c);
  }
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& c = cases[k];
    const Vector formula = truncated_normal_mean(c.mu, c.sigma, c.alpha);
    Rng rng = make_stream(opt.seed, {kAnalysisStream, 40, k});
    const auto oracle = truncated_normal_rejection_mean(c.mu, c.sigma, c.alpha, opt.rejection_accepted, rng);
    bool ok = true;
    nlohmann::json coords = nlohmann::json::array();
    for (Eigen::Index i = 0; i < formula.size(); ++i) {
      ok = ok && std::abs(formula(i) - oracle[i].value) <= 3.0 * oracle[i].std_error;
      coords.push_back({{"formula", formula(i)}, {"rejection", oracle[i].value}, {"stderr", oracle[i].std_error}});
    }
    rep.checks.push_back({"rejection oracle d=" + std::to_string(c.mu.size()), ok, {{"coordinates", coords}}});
  }
  return rep;
}

inline SuiteReport verify_chaining(const VerifyOptions& opt) {
  SuiteReport rep{"chaining", {}};
  const int n_sup = std::max(2, opt.mc_samples / 10);
  bool ok = true;
  nlohmann::json rows = nlohmann::json::array();
  const int per_axis[] = {0, 128, 24, 10};
  for (int d = 1; d <= 3; ++d) {
    for (double kappa : {0.25, 1.0, 4.0}) {
      const KernelSpec spec = KernelSpec::matern_half(1.0, kappa);
      const GpSampler sampler(spec, ActionSpace::cube_grid(d, per_axis[d]));
      Rng rng = make_stream(opt.seed, {kAnalysisStream, 50, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(kappa * 100)});
      const Estimate e = expected_sup_mc(sampler, n_sup, rng);
      const double bound = dudley_bound(spec, d);
      ok = ok && e.value - 3.0 * e.std_error <= bound;
      rows.push_back({{"d", d}, {"kappa", kappa}, {"expected_sup", e.value}, {"stderr", e.std_error}, {"bound", bound}});
    }
  }
  rep.checks.push_back({"dudley bound", ok, {{"cases", rows}}});

  ok = true;
  rows = nlohmann::json::array();
  for (int n : {2, 10, 100}) {
    const GpSampler sampler(KernelSpec::diagonal_white(1.0), ActionSpace::finite(n));
    Rng rng = make_stream(opt.seed, {kAnalysisStream, 51, static_cast<std::uint64_t>(n)});
    const Estimate e = expected_sup_mc(sampler, n_sup, rng);
    const double bound = gaussian_max_bound(1.0, n);
    ok = ok && e.value - 3.0 * e.std_error <= bound;
    rows.push_back({{"N", n}, {"expected_max", e.value}, {"stderr", e.std_error}, {"bound", bound}});
  }
  rep.checks.push_back({"gaussian maximum bound", ok, {{"cases", rows}}});

  ok = true;
  rows = nlohmann::json::array();
  {
    const KernelSpec spec = KernelSpec::matern_half(1.0, 1.0);
    const GpSampler sampler(spec, ActionSpace::cube_grid(1, 256));
    for (double h : {1.0 / 64, 1.0 / 16, 1.0 / 4}) {
      Rng rng = make_stream(opt.seed, {kAnalysisStream, 52, static_cast<std::uint64_t>(1.0 / h)});
      const Estimate e = modulus_of_continuity_mc(sampler, h, std::max(2, n_sup / 4), rng);
      const double bound = modulus_bound(spec, 1, h);
      ok = ok && e.value - 3.0 * e.std_error <= bound;
      rows.push_back({{"h", h}, {"modulus", e.value}, {"stderr", e.std_error}, {"bound", bound}});
    }
  }
  rep.checks.push_back({"modulus of continuity bound", ok, {{"cases", rows}}});
  return rep;
}

inline const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names = {"decomposition", "bregman", "hessian", "truncnorm", "chaining"};
  return names;
}

inline std::vector<SuiteReport> run_verify(const std::string& suite, const VerifyOptions& opt = {}) {
  auto one = [&](const std::string& name) -> SuiteReport {
    if (name == "decomposition") return verify_decomposition(opt);
    if (name == "bregman") return verify_bregman(opt);
    if (name == "hessian") return verify_hessian(opt);
    if (name == "truncnorm") return verify_truncnorm(opt);
    if (name == "chaining") return verify_chaining(opt);
    throw InvalidInput("unknown verification suite '" + name + "'");
  };
  std::vector<SuiteReport> out;
  if (suite == "all") {
    for (const auto& n : verify_suite_names()) out.push_back(one(n));
  } else {
    out.push_back(one(suite));
  }
  return out;
}

}  // namespace tsol
