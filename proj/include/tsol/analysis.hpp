#pragma once

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "tsol/core.hpp"
#include "tsol/errors.hpp"
#include "tsol/gp.hpp"
#include "tsol/learners.hpp"
#include "tsol/stats.hpp"

namespace tsol {

// ---------------------------------------------------------------------------
// Perturbed maxima

// Gamma*_t(f) = E max_x (f(x) + gamma_{t:T}(x)), gamma_{t:T} ~ sqrt(T - t + 1) GP(0,k).
// t = T + 1 is the unperturbed maximum.
inline Estimate gamma_star_mc(const Eigen::Ref<const Vector>& f, int t, int horizon, const GpSampler& prior,
                              int n_samples, Rng& rng) {
  if (t < 1 || t > horizon + 1) throw InvalidInput("gamma_star_mc: need 1 <= t <= T + 1");
  if (f.size() != prior.size()) throw InvalidInput("gamma_star_mc: dimension mismatch");
  if (t == horizon + 1) return {f.maxCoeff(), 0.0, static_cast<std::size_t>(n_samples)};
  if (n_samples < 2) throw InvalidInput("gamma_star_mc: need n_samples >= 2");
  const double scale = std::sqrt(static_cast<double>(horizon - t + 1));
  RunningStats stats;
  Vector draw(prior.size());
  for (int s = 0; s < n_samples; ++s) {
    prior.sample_into(scale, rng, draw);
    stats.add((draw + f).maxCoeff());
  }
  return stats.estimate();
}

// D_{Gamma*_t}(y_{1:t} || y_{1:t-1}) in probabilistic form:
//   E[(y_{1:t} + g)(x*_{y_{1:t} + g}) - (y_{1:t} + g)(x*_{y_{1:t-1} + g})],  g = gamma_{t:T}.
// Both maxima share each draw; every summand is >= 0.
inline Estimate bregman_divergence_mc(const Eigen::Ref<const Vector>& cumulative_t,
                                      const Eigen::Ref<const Vector>& cumulative_prev, int t, int horizon,
                                      const GpSampler& prior, int n_samples, Rng& rng) {
  if (t < 1 || t > horizon) throw InvalidInput("bregman_divergence_mc: need 1 <= t <= T");
  if (cumulative_t.size() != prior.size() || cumulative_prev.size() != prior.size())
    throw InvalidInput("bregman_divergence_mc: dimension mismatch");
  if (n_samples < 2) throw InvalidInput("bregman_divergence_mc: need n_samples >= 2");
  const double scale = std::sqrt(static_cast<double>(horizon - t + 1));
  RunningStats stats;
  Vector g(prior.size());
  for (int s = 0; s < n_samples; ++s) {
    prior.sample_into(scale, rng, g);
    const int follow = argmax_index(cumulative_prev + g);
    const Vector be = cumulative_t + g;
    stats.add(be.maxCoeff() - be(follow));
  }
  return stats.estimate();
}

// ---------------------------------------------------------------------------
// Regret decomposition

struct DecompositionEstimate {
  std::vector<Estimate> per_round_excess;   // E_t
  std::vector<Estimate> per_round_bregman;  // D_t
  std::vector<Estimate> per_round_collected;  // <y_t, p_t>
  Estimate prior_regret;                    // E max gamma_{1:T}
  Estimate total_excess;
  Estimate total_bregman;
  Estimate excess_minus_bregman;            // paired: sum_t (E_t - D_t)
  double best_in_hindsight = 0.0;

  // prior + sum E_t, which equals the expected regret of Thompson sampling
  // on this reward sequence.
  Estimate implied_regret() const {
    return {prior_regret.value + total_excess.value, pooled_stderr(prior_regret, total_excess),
            std::min(prior_regret.n, total_excess.n)};
  }
};

namespace detail {

inline Estimate sum_independent(std::span<const Estimate> xs) {
  Estimate out;
  double var = 0.0;
  out.n = xs.empty() ? 0 : xs.front().n;
  for (const auto& e : xs) {
    out.value += e.value;
    var += e.std_error * e.std_error;
  }
  out.std_error = std::sqrt(var);
  return out;
}

inline void require_thompson_prior(const LearnerSpec& learner, const GpSampler& prior) {
  const auto* ts = std::get_if<ThompsonSpec>(&learner);
  if (!ts) throw InvalidInput("decomposition applies to Thompson sampling only, got " + learner_name(learner));
  if (!(ts->prior == prior.spec()))
    throw InvalidInput("decomposition prior differs from the learner's prior");
}

}  // namespace detail

// Per-round excess regret and Bregman terms for Thompson sampling on a fixed
// reward sequence. Each round draws gamma_{t+1:T} = sqrt(T - t) g_a and
// gamma_t = g_b independently and uses them in every term of that round:
//   E_t sample = max(y_{1:t} + gamma_{t+1:T}) - (y_{1:t} + gamma_{t:T})(x*_{y_{1:t-1} + gamma_{t:T}})
//   D_t sample = max(y_{1:t} + gamma_{t:T})   - (y_{1:t} + gamma_{t:T})(x*_{y_{1:t-1} + gamma_{t:T}})
// The prior is centered, so the virtual-adversary term E<gamma_t, p_t^(gamma)> is 0.
// Rounds use independent streams derived from one draw of `rng`.
inline DecompositionEstimate decompose_regret(std::span<const RewardFunction> rewards, const GpSampler& prior,
                                              const LearnerSpec& learner, int n_samples, Rng& rng) {
  detail::require_thompson_prior(learner, prior);
  if (rewards.empty()) throw InvalidInput("decompose_regret: empty reward sequence");
  if (n_samples < 2) throw InvalidInput("decompose_regret: need n_samples >= 2");
  const int horizon = static_cast<int>(rewards.size());
  const int n = prior.size();
  const std::uint64_t base = rng();

  DecompositionEstimate out;
  out.per_round_excess.reserve(horizon);
  out.per_round_bregman.reserve(horizon);
  out.per_round_collected.reserve(horizon);

  std::vector<Estimate> gaps;
  Vector prev = Vector::Zero(n);
  Vector ga(n), gb(n);
  for (int t = 1; t <= horizon; ++t) {
    if (rewards[t - 1].size() != n) throw InvalidInput("decompose_regret: reward dimension mismatch");
    const Vector& y = rewards[t - 1].values;
    const Vector cur = prev + y;
    const double tail_scale = std::sqrt(static_cast<double>(horizon - t));
    Rng round_rng = make_stream(base, {static_cast<std::uint64_t>(t)});
    RunningStats excess, bregman, collected, gap;
    for (int s = 0; s < n_samples; ++s) {
      prior.sample_into(tail_scale, round_rng, ga);
      prior.sample_into(1.0, round_rng, gb);
      const Vector gamma_tT = ga + gb;
      const int follow = argmax_index(prev + gamma_tT);
      const Vector be = cur + gamma_tT;
      const double next_max = (cur + ga).maxCoeff();
      const double be_max = be.maxCoeff();
      excess.add(next_max - be(follow));
      bregman.add(be_max - be(follow));
      collected.add(y(follow));
      gap.add(next_max - be_max);
    }
    out.per_round_excess.push_back(excess.estimate());
    out.per_round_bregman.push_back(bregman.estimate());
    out.per_round_collected.push_back(collected.estimate());
    gaps.push_back(gap.estimate());
    prev = cur;
  }
  out.best_in_hindsight = prev.maxCoeff();

  Rng prior_rng = make_stream(base, {0});
  out.prior_regret = expected_sup_mc(prior, n_samples, prior_rng, std::sqrt(static_cast<double>(horizon)));
  out.total_excess = detail::sum_independent(out.per_round_excess);
  out.total_bregman = detail::sum_independent(out.per_round_bregman);
  out.excess_minus_bregman = detail::sum_independent(gaps);
  return out;
}

inline DecompositionEstimate decompose_regret(const Trajectory& trajectory, const GpSampler& prior,
                                              const LearnerSpec& learner, int n_samples, Rng& rng) {
  return decompose_regret(std::span<const RewardFunction>(trajectory.rewards), prior, learner, n_samples, rng);
}

struct BregmanCheck {
  Estimate total_excess;
  Estimate total_bregman;
  Estimate excess_minus_bregman;
  double tolerance = 0.0;  // 3 standard errors of the paired difference
  bool holds = false;
};

// Sum_t E_t <= Sum_t D_t, judged on the paired difference at 3 standard errors.
// A violation is reported, not thrown.
inline BregmanCheck verify_bregman_bound(std::span<const RewardFunction> rewards, const GpSampler& prior,
                                         int n_samples, Rng& rng) {
  const LearnerSpec thompson = ThompsonSpec{prior.spec()};
  const auto dec = decompose_regret(rewards, prior, thompson, n_samples, rng);
  BregmanCheck check;
  check.total_excess = dec.total_excess;
  check.total_bregman = dec.total_bregman;
  check.excess_minus_bregman = dec.excess_minus_bregman;
  check.tolerance = 3.0 * dec.excess_minus_bregman.std_error;
  check.holds = dec.excess_minus_bregman.value <= check.tolerance;
  return check;
}

inline RegretReport make_regret_report(const Trajectory& trajectory, const GpSampler& prior,
                                       const LearnerSpec& learner, int n_samples, Rng& rng, double bound_value) {
  const auto dec = decompose_regret(trajectory, prior, learner, n_samples, rng);
  RegretReport r;
  r.best_in_hindsight_value = best_in_hindsight(trajectory.cumulative.at(trajectory.horizon)).value;
  r.realized_regret = r.best_in_hindsight_value - trajectory.collected();
  r.prior_regret = dec.prior_regret.value;
  r.prior_regret_stderr = dec.prior_regret.std_error;
  r.excess_regret = dec.total_excess.value;
  r.excess_regret_stderr = dec.total_excess.std_error;
  r.bregman_sum = dec.total_bregman.value;
  r.bregman_sum_stderr = dec.total_bregman.std_error;
  r.bound_value = bound_value;
  return r;
}

// ---------------------------------------------------------------------------
// Kernel/class coupling condition for a beta-bounded lambda-Lipschitz class
// and a MaternHalf kernel:
//   sup_y y(x) - y(x') k(x,x')/k(x',x') <= C (1 - k(x,x')/k(x',x')),
// with the supremum replaced by its Lipschitz envelope min(2 beta, (lambda + beta/kappa) |x - x'|).

inline double lipschitz_envelope(double beta, double lambda, double kappa, double dist) {
  return std::min(2.0 * beta, (lambda + beta / kappa) * dist);
}

// C = 2 beta / (1 - exp(-2 beta / (lambda kappa + beta))).
inline double hessian_constant(double beta, double lambda, double kappa) {
  return 2.0 * beta / (-std::expm1(-2.0 * beta / (lambda * kappa + beta)));
}

// Alternative form beta (lambda + 1/kappa) / ((1/kappa)(1 - exp(-2/(lambda kappa + 1)))).
// Agrees with hessian_constant when beta = 1 and kappa = beta / lambda.
inline double hessian_constant_alternative(double beta, double lambda, double kappa) {
  return beta * (lambda + 1.0 / kappa) / ((1.0 / kappa) * (-std::expm1(-2.0 / (lambda * kappa + 1.0))));
}

// Distance at which the envelope's kink touches C (1 - exp(-d/kappa)).
inline double hessian_equality_distance(double beta, double lambda, double kappa) {
  return 2.0 * beta * kappa / (lambda * kappa + beta);
}

struct HessianConditionReport {
  double max_lhs_minus_rhs = 0.0;
  double empirical_C = 0.0;
  double analytic_C = 0.0;
  double alternative_C = 0.0;
  std::size_t pairs = 0;

  bool satisfied(double tolerance = 1e-10) const { return max_lhs_minus_rhs <= tolerance; }
};

inline HessianConditionReport check_hessian_condition(double beta, double lambda, const KernelSpec& spec,
                                                      const Matrix& points) {
  spec.validate();
  if (spec.family != KernelFamily::kMaternHalf) throw InvalidInput("check_hessian_condition: MaternHalf required");
  if (!(beta > 0.0) || !(lambda >= 0.0)) throw InvalidInput("check_hessian_condition: bad beta/lambda");
  const double kappa = spec.lengthscale;
  HessianConditionReport r;
  r.analytic_C = hessian_constant(beta, lambda, kappa);
  r.alternative_C = hessian_constant_alternative(beta, lambda, kappa);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.rows(); ++j) {
      ++r.pairs;
      if (i == j) continue;
      const double dist = (points.row(i) - points.row(j)).norm();
      const double gap = -std::expm1(-dist / kappa);  // 1 - k(x,x')/k(x',x')
      const double lhs = lipschitz_envelope(beta, lambda, kappa, dist);
      r.max_lhs_minus_rhs = std::max(r.max_lhs_minus_rhs, lhs - r.analytic_C * gap);
      if (gap > 0) r.empirical_C = std::max(r.empirical_C, lhs / gap);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Truncated multivariate normal, d <= 3.

namespace detail {

inline double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

struct Conditional {
  Vector mean;
  Matrix cov;
};

// Law of z_{-i} given z_i = value.
inline Conditional condition_on(const Vector& mu, const Matrix& sigma, int i, double value) {
  const int d = static_cast<int>(mu.size());
  std::vector<int> rest;
  for (int j = 0; j < d; ++j)
    if (j != i) rest.push_back(j);
  Conditional c;
  c.mean.resize(d - 1);
  c.cov.resize(d - 1, d - 1);
  for (int a = 0; a < d - 1; ++a) {
    c.mean(a) = mu(rest[a]) + sigma(rest[a], i) / sigma(i, i) * (value - mu(i));
    for (int b = 0; b < d - 1; ++b)
      c.cov(a, b) = sigma(rest[a], rest[b]) - sigma(rest[a], i) * sigma(i, rest[b]) / sigma(i, i);
  }
  return c;
}

inline Vector drop(const Vector& v, int i) {
  Vector out(v.size() - 1);
  for (Eigen::Index j = 0, k = 0; j < v.size(); ++j)
    if (j != i) out(k++) = v(j);
  return out;
}

}  // namespace detail

// P(z <= upper) for z ~ N(mu, sigma), d <= 3, by adaptive Gauss-Kronrod on
// the first coordinate (recursively for d = 3).
inline double mvn_cdf(const Vector& mu, const Matrix& sigma, const Vector& upper) {
  const Eigen::Index d = mu.size();
  if (d < 1 || d > 3) throw InvalidInput("mvn_cdf: 1 <= d <= 3 required");
  const double s0 = std::sqrt(sigma(0, 0));
  const double b0 = (upper(0) - mu(0)) / s0;
  if (d == 1) return detail::std_normal_cdf(b0);
  if (b0 < -40.0) return 0.0;
  const Vector rest_upper = detail::drop(upper, 0);
  auto integrand = [&](double v) {
    const auto c = detail::condition_on(mu, sigma, 0, mu(0) + s0 * v);
    return detail::std_normal_pdf(v) * mvn_cdf(c.mean, c.cov, rest_upper);
  };
  const double lower = -40.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, lower, std::min(b0, 40.0), 12,
                                                                        1e-13);
}

// Marginal density at alpha_i of coordinate i of z ~ TN(mu, sigma; -inf, alpha).
inline double truncated_marginal_density(const Vector& mu, const Matrix& sigma, const Vector& alpha, int i,
                                         double region_mass) {
  const double s = std::sqrt(sigma(i, i));
  const double dens = detail::std_normal_pdf((alpha(i) - mu(i)) / s) / s;
  if (mu.size() == 1) return dens / region_mass;
  const auto c = detail::condition_on(mu, sigma, i, alpha(i));
  return dens * mvn_cdf(c.mean, c.cov, detail::drop(alpha, i)) / region_mass;
}

// E z = mu - Sigma g, g_i = marginal density of the truncated z_i at alpha_i.
inline Vector truncated_normal_mean(const Vector& mu, const Matrix& sigma, const Vector& alpha) {
  const Eigen::Index d = mu.size();
  if (d < 1 || d > 3) throw InvalidInput("truncated_normal_mean: 1 <= d <= 3 required");
  if (sigma.rows() != d || sigma.cols() != d || alpha.size() != d)
    throw InvalidInput("truncated_normal_mean: dimension mismatch");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * sigma.cwiseAbs().maxCoeff())
    throw InvalidInput("truncated_normal_mean: covariance not symmetric");
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) throw InvalidInput("truncated_normal_mean: covariance not positive definite");
  const double mass = mvn_cdf(mu, sigma, alpha);
  if (!(mass >= 1e-12)) throw DegenerateTruncation("truncated_normal_mean: truncation region has mass < 1e-12");
  Vector g(d);
  for (Eigen::Index i = 0; i < d; ++i) g(i) = truncated_marginal_density(mu, sigma, alpha, static_cast<int>(i), mass);
  return mu - sigma * g;
}

// ---------------------------------------------------------------------------
// Closed-form rates

// 4 sqrt(T ln N): Thompson sampling, DiagonalWhite prior with sigma = sqrt(2).
inline double regret_bound_finite(double horizon, int n) {
  if (n < 2) throw InvalidInput("regret_bound_finite: N >= 2 required");
  if (horizon < 0) throw InvalidInput("regret_bound_finite: T >= 0 required");
  return 4.0 * std::sqrt(horizon * std::log(static_cast<double>(n)));
}

// beta (32 + 32 / (1 - 1/e)) sqrt(T d ln(1 + sqrt(d) lambda / beta)).
inline double regret_bound_lipschitz(double horizon, int d, double beta, double lambda) {
  if (horizon < 0 || d < 1 || !(beta > 0.0) || !(lambda >= 0.0))
    throw InvalidInput("regret_bound_lipschitz: bad parameters");
  const double coeff = 32.0 + 32.0 / (1.0 - std::exp(-1.0));
  const double dd = d;
  return beta * coeff * std::sqrt(horizon * dd * std::log1p(std::sqrt(dd) * lambda / beta));
}

// General Thompson rate: sqrt(T) (1 + beta (beta + C) / sigma^2) E sup gamma_1,
// with E sup gamma_1 <= sigma * unit_sup_bound.
inline double thompson_regret_bound(double horizon, double beta, double coupling_C, double sigma,
                                    double unit_sup_bound) {
  return std::sqrt(horizon) * (1.0 + beta * (beta + coupling_C) / (sigma * sigma)) * sigma * unit_sup_bound;
}

// Constant-rate FTPL analogue: (eta sigma + T beta (beta + C) / (2 eta sigma)) * unit_sup_bound.
inline double ftpl_regret_bound(double horizon, double eta, double beta, double coupling_C, double sigma,
                                double unit_sup_bound) {
  if (!(eta > 0.0)) throw InvalidInput("ftpl_regret_bound: eta must be positive");
  return (eta * sigma + horizon * beta * (beta + coupling_C) / (2.0 * eta * sigma)) * unit_sup_bound;
}

// h * (largest neighbour slope of y): the modulus of continuity at h of the
// piecewise-linear interpolant of y on the lattice.
inline double grid_modulus(const Eigen::Ref<const Vector>& values, const ActionSpace& space, double h) {
  if (space.is_finite() || h <= 0.0) return 0.0;
  return h * grid_lipschitz_constant(RewardFunction(values), space);
}

// omega_t(h) for the cumulative sums y_{1:t}, t = 1..T.
inline std::vector<double> trajectory_moduli(const Trajectory& trajectory, const ActionSpace& space, double h) {
  std::vector<double> out;
  out.reserve(trajectory.horizon);
  for (int t = 1; t <= trajectory.horizon; ++t) out.push_back(grid_modulus(trajectory.cumulative[t], space, h));
  return out;
}

// Discretization charge of a cover of radius h at round t:
// 2 omega_t(h) + 2 sqrt(T - t + 1) psi(h), psi the closed-form GP modulus bound.
inline double cover_error_budget_round(double h, const KernelSpec& spec, int d, double omega_t, int horizon, int t) {
  if (h < 0) throw InvalidInput("cover_error_budget: h must be nonnegative");
  if (h == 0.0) return 0.0;
  return 2.0 * omega_t + 2.0 * std::sqrt(static_cast<double>(horizon - t + 1)) * modulus_bound(spec, d, h);
}

// Sum of the per-round charges over t = 1..T.
inline double cover_error_budget(double h, const KernelSpec& spec, int d, std::span<const double> omega,
                                 int horizon) {
  if (static_cast<int>(omega.size()) != horizon) throw InvalidInput("cover_error_budget: need one omega per round");
  double total = 0.0;
  for (int t = 1; t <= horizon; ++t) total += cover_error_budget_round(h, spec, d, omega[t - 1], horizon, t);
  return total;
}

}  // namespace tsol
