#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "tsol/core.hpp"
#include "tsol/gp.hpp"

namespace tsol {

struct ThompsonSpec {
  KernelSpec prior;
};
struct FtplSpec {
  KernelSpec prior;
  double eta = 1.0;
};
struct ExpWeightsSpec {
  std::optional<double> eta;  // defaults to sqrt(8 ln N / T)
};
struct UniformSpec {};

using LearnerSpec = std::variant<ThompsonSpec, FtplSpec, ExpWeightsSpec, UniformSpec>;

inline std::string learner_name(const LearnerSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ThompsonSpec>) return "thompson";
        if constexpr (std::is_same_v<S, FtplSpec>) return "ftpl";
        if constexpr (std::is_same_v<S, ExpWeightsSpec>) return "exp_weights";
        return "uniform";
      },
      spec);
}

// argmax of cumulative + scale * gamma, gamma ~ GP(0, prior). One fresh draw
// per call; a draw is consumed even when scale == 0.
inline int perturbed_leader(const Eigen::Ref<const Vector>& cumulative, double scale, const GpSampler& prior,
                            Rng& rng) {
  if (cumulative.size() != prior.size()) throw InvalidInput("perturbed leader: dimension mismatch");
  Vector perturbed(prior.size());
  prior.sample_into(scale, rng, perturbed);
  perturbed += cumulative;
  return argmax_index(perturbed);
}

// Thompson sampling over future rewards: with IID GP(0,k) rounds, the
// remaining sum gamma_{t:T} is distributed as sqrt(T - t + 1) * GP(0,k).
// `prior_scale` is a test hook (0 gives follow-the-leader).
inline int thompson_step(const Eigen::Ref<const Vector>& cumulative, int t, int horizon, const GpSampler& prior,
                         Rng& rng, double prior_scale = 1.0) {
  if (t < 1 || t > horizon) throw InvalidInput("thompson_step: need 1 <= t <= T");
  return perturbed_leader(cumulative, prior_scale * std::sqrt(static_cast<double>(horizon - t + 1)), prior, rng);
}

// Constant-rate FTPL. eta == 0 is follow-the-leader.
inline int ftpl_step(const Eigen::Ref<const Vector>& cumulative, double eta, const GpSampler& prior, Rng& rng) {
  if (!(eta >= 0.0)) throw InvalidInput("ftpl_step: eta must be nonnegative");
  return perturbed_leader(cumulative, eta, prior, rng);
}

inline std::vector<double> exp_weights_probabilities(const Eigen::Ref<const Vector>& cumulative, double eta) {
  if (cumulative.size() == 0) throw InvalidInput("exp_weights: empty cumulative");
  const double top = cumulative.maxCoeff();
  std::vector<double> w(cumulative.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < cumulative.size(); ++i) {
    w[i] = std::exp(eta * (cumulative(i) - top));
    total += w[i];
  }
  if (!std::isfinite(total) || !(total > 0.0)) throw NumericalError("exp_weights: non-finite weights");
  for (double& x : w) {
    x /= total;
    if (!std::isfinite(x)) throw NumericalError("exp_weights: non-finite weights");
  }
  return w;
}

inline int sample_index(const std::vector<double>& probabilities, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    acc += probabilities[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probabilities.size()) - 1;
}

inline int exp_weights_step(const Eigen::Ref<const Vector>& cumulative, double eta, Rng& rng) {
  return sample_index(exp_weights_probabilities(cumulative, eta), rng);
}

inline double default_exp_weights_eta(int n, int horizon) {
  return std::sqrt(8.0 * std::log(static_cast<double>(n)) / horizon);
}

inline int uniform_step(int n, Rng& rng) {
  if (n < 1) throw InvalidInput("uniform_step: empty action space");
  std::uniform_int_distribution<int> dist(0, n - 1);
  return dist(rng);
}

// Learner bound to an action space and horizon.
class Learner {
 public:
  // Number of internal simulations used to describe a randomized
  // perturbation strategy to the adversary.
  static constexpr int kStrategySimulations = 256;

  Learner(LearnerSpec spec, const ActionSpace& space, int horizon) : spec_(std::move(spec)) {
    if (horizon < 1) throw InvalidInput("learner: horizon must be >= 1");
    n_ = space.size();
    if (const auto* ts = std::get_if<ThompsonSpec>(&spec_)) {
      sampler_ = std::make_shared<GpSampler>(ts->prior, space);
    } else if (const auto* f = std::get_if<FtplSpec>(&spec_)) {
      if (!(f->eta >= 0.0)) throw InvalidInput("ftpl: eta must be nonnegative");
      sampler_ = std::make_shared<GpSampler>(f->prior, space);
    } else if (auto* e = std::get_if<ExpWeightsSpec>(&spec_)) {
      if (!space.is_finite()) throw InvalidInput("exp_weights requires a finite action space");
      if (!e->eta) e->eta = default_exp_weights_eta(n_, horizon);
      if (!(*e->eta >= 0.0)) throw InvalidInput("exp_weights: eta must be nonnegative");
    }
  }

  const LearnerSpec& spec() const { return spec_; }
  const GpSampler* prior_sampler() const { return sampler_.get(); }

  bool compatible_with(const ActionSpace& space) const {
    if (space.size() != n_) return false;
    if (std::holds_alternative<ExpWeightsSpec>(spec_)) return space.is_finite();
    return true;
  }

  int act(const RoundContext& ctx, Rng& rng) const {
    const Vector& cum = *ctx.cumulative;
    return std::visit(
        [&](const auto& s) -> int {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, ThompsonSpec>) return thompson_step(cum, ctx.t, ctx.horizon, *sampler_, rng);
          if constexpr (std::is_same_v<S, FtplSpec>) return ftpl_step(cum, s.eta, *sampler_, rng);
          if constexpr (std::is_same_v<S, ExpWeightsSpec>) return exp_weights_step(cum, *s.eta, rng);
          return uniform_step(n_, rng);
        },
        spec_);
  }

  // p_t: exact for uniform and exponential weights, simulated otherwise.
  std::vector<double> action_probabilities(const RoundContext& ctx, Rng& rng) const {
    if (std::holds_alternative<UniformSpec>(spec_)) return std::vector<double>(n_, 1.0 / n_);
    if (const auto* e = std::get_if<ExpWeightsSpec>(&spec_)) return exp_weights_probabilities(*ctx.cumulative, *e->eta);
    std::vector<double> freq(n_, 0.0);
    for (int s = 0; s < kStrategySimulations; ++s) freq[act(ctx, rng)] += 1.0 / kStrategySimulations;
    return freq;
  }

 private:
  LearnerSpec spec_;
  int n_ = 0;
  std::shared_ptr<const GpSampler> sampler_;
};

}  // namespace tsol
