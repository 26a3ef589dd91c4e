#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tsol/core.hpp"

namespace tsol {

struct AdversarySpec;

struct RademacherSpec {};
struct CenteredSpec {
  std::shared_ptr<const AdversarySpec> base;
};
struct ZigzagSpec {
  double beta = 1.0;
  double lambda = 1.0;
};
struct AdaptiveGreedySpec {
  double bound = 1.0;
};
struct FixedSpec {
  std::vector<RewardFunction> sequence;
};

struct AdversarySpec {
  std::variant<RademacherSpec, CenteredSpec, ZigzagSpec, AdaptiveGreedySpec, FixedSpec> kind;
};

inline AdversarySpec centered(AdversarySpec base) {
  return AdversarySpec{CenteredSpec{std::make_shared<const AdversarySpec>(std::move(base))}};
}

inline std::string adversary_name(const AdversarySpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, RademacherSpec>) return "rademacher";
        if constexpr (std::is_same_v<S, CenteredSpec>) return "centered(" + adversary_name(*s.base) + ")";
        if constexpr (std::is_same_v<S, ZigzagSpec>) return "zigzag";
        if constexpr (std::is_same_v<S, AdaptiveGreedySpec>) return "adaptive_greedy";
        return "fixed";
      },
      spec.kind);
}

// Independent +-1 per action.
inline RewardFunction rademacher_round(const ActionSpace& space, Rng& rng) {
  if (!space.is_finite()) throw InvalidInput("rademacher_round: finite action space required");
  std::bernoulli_distribution coin(0.5);
  Vector y(space.size());
  for (int i = 0; i < space.size(); ++i) y(i) = coin(rng) ? 1.0 : -1.0;
  return RewardFunction(std::move(y));
}

// Removes the per-round conditional mean. An equalizing adversary's mean is a
// constant function, so when it is not supplied it is estimated as the grand
// mean of the batch.
inline std::vector<RewardFunction> center_adversary(const std::vector<RewardFunction>& batch,
                                                    std::optional<double> known_mean = std::nullopt) {
  if (batch.empty()) throw InvalidInput("center_adversary: empty batch");
  double shift = 0.0;
  if (known_mean) {
    shift = *known_mean;
  } else {
    double total = 0.0;
    double count = 0.0;
    for (const auto& y : batch) {
      total += y.values.sum();
      count += y.size();
    }
    shift = total / count;
  }
  std::vector<RewardFunction> out;
  out.reserve(batch.size());
  for (const auto& y : batch) out.emplace_back((y.values.array() - shift).matrix());
  return out;
}

// Tents of height beta * s_j (s_j Rademacher) over cells of width 2 beta / lambda
// along axis 0, constant along the other axes. Slopes are exactly +-lambda and
// the function vanishes on cell boundaries, so both class constraints hold.
inline RewardFunction lipschitz_zigzag_round(const ActionSpace& space, double beta, double lambda, Rng& rng) {
  if (space.is_finite()) throw InvalidInput("lipschitz_zigzag_round: cube grid required");
  if (!(beta > 0.0)) throw InvalidInput("lipschitz_zigzag_round: beta must be positive");
  if (!(lambda >= 0.0)) throw InvalidInput("lipschitz_zigzag_round: lambda must be nonnegative");
  std::bernoulli_distribution coin(0.5);
  Vector y(space.size());
  if (lambda == 0.0) {
    y.setConstant(coin(rng) ? beta : -beta);
  } else {
    const double width = 2.0 * beta / lambda;
    if (space.spacing() > width)
      throw InvalidInput("lipschitz_zigzag_round: grid spacing exceeds 2*beta/lambda, spikes cannot reach full height");
    const int cells = std::max(1, static_cast<int>(std::ceil(1.0 / width - 1e-12)));
    std::vector<double> sign(cells);
    for (double& s : sign) s = coin(rng) ? 1.0 : -1.0;
    for (int i = 0; i < space.size(); ++i) {
      const double u = space.points()(i, 0);
      const int cell = std::min(cells - 1, static_cast<int>(std::floor(u / width)));
      const double centre = (cell + 0.5) * width;
      const double height = std::max(0.0, beta - lambda * std::abs(u - centre));
      y(i) = sign[cell] * height;
    }
  }
  RewardFunction out(std::move(y));
  if (out.sup_norm() > beta + 1e-12 || grid_lipschitz_constant(out, space) > lambda + 1e-12)
    throw std::logic_error("lipschitz_zigzag_round: constructed function violates its class constraints");
  return out;
}

// -bound on the learner's most probable action, +bound on the best-so-far
// among the others, 0 elsewhere. Lowest index wins ties in both choices.
inline RewardFunction adaptive_greedy_round(const std::vector<double>& frequencies,
                                            const Eigen::Ref<const Vector>& cumulative, double bound) {
  const int n = static_cast<int>(frequencies.size());
  if (n == 0 || cumulative.size() != n) throw InvalidInput("adaptive_greedy_round: dimension mismatch");
  double total = 0.0;
  for (double f : frequencies) total += f;
  if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("adaptive_greedy_round: frequencies must sum to 1");
  int likely = 0;
  for (int i = 1; i < n; ++i)
    if (frequencies[i] > frequencies[likely]) likely = i;
  Vector y = Vector::Zero(n);
  y(likely) = -bound;
  int target = -1;
  for (int i = 0; i < n; ++i) {
    if (i == likely) continue;
    if (target < 0 || cumulative(i) > cumulative(target)) target = i;
  }
  if (target >= 0) y(target) = bound;
  return RewardFunction(std::move(y));
}

// Adversary bound to an action space and horizon.
class Adversary {
 public:
  Adversary(AdversarySpec spec, const ActionSpace& space, int horizon) : spec_(std::move(spec)), n_(space.size()) {
    validate(spec_, space, horizon);
  }

  const AdversarySpec& spec() const { return spec_; }

  bool compatible_with(const ActionSpace& space) const {
    try {
      validate(spec_, space, 1);
    } catch (const InvalidInput&) {
      return false;
    }
    return space.size() == n_;
  }

  RewardFunction next(const RoundContext& ctx, const StrategyView& strategy, Rng& rng) const {
    return draw(spec_, ctx, strategy, rng);
  }

  // Largest |y| the adversary can produce, when known.
  static std::optional<double> sup_bound(const AdversarySpec& spec) {
    return std::visit(
        [](const auto& s) -> std::optional<double> {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, RademacherSpec>) return 1.0;
          if constexpr (std::is_same_v<S, CenteredSpec>) {
            auto b = sup_bound(*s.base);
            if (b && std::holds_alternative<RademacherSpec>(s.base->kind)) return b;
            if (b && std::holds_alternative<ZigzagSpec>(s.base->kind)) return b;
            return b ? std::optional<double>(2.0 * *b) : std::nullopt;
          }
          if constexpr (std::is_same_v<S, ZigzagSpec>) return s.beta;
          if constexpr (std::is_same_v<S, AdaptiveGreedySpec>) return s.bound;
          if constexpr (std::is_same_v<S, FixedSpec>) {
            double m = 0.0;
            for (const auto& y : s.sequence) m = std::max(m, y.sup_norm());
            return m;
          }
          return std::nullopt;
        },
        spec.kind);
  }

 private:
  static void validate(const AdversarySpec& spec, const ActionSpace& space, int horizon) {
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, RademacherSpec>) {
            if (!space.is_finite()) throw InvalidInput("rademacher adversary requires a finite action space");
          } else if constexpr (std::is_same_v<S, CenteredSpec>) {
            if (!s.base) throw InvalidInput("centered adversary needs a base");
            validate(*s.base, space, horizon);
          } else if constexpr (std::is_same_v<S, ZigzagSpec>) {
            if (space.is_finite()) throw InvalidInput("zigzag adversary requires a cube grid");
            if (!(s.beta > 0.0) || !(s.lambda >= 0.0)) throw InvalidInput("zigzag adversary: bad beta/lambda");
            if (s.lambda > 0.0 && space.spacing() > 2.0 * s.beta / s.lambda)
              throw InvalidInput("zigzag adversary: grid spacing exceeds 2*beta/lambda");
          } else if constexpr (std::is_same_v<S, AdaptiveGreedySpec>) {
            if (!space.is_finite()) throw InvalidInput("adaptive greedy adversary requires a finite action space");
            if (!(s.bound > 0.0)) throw InvalidInput("adaptive greedy adversary: bound must be positive");
          } else {
            if (static_cast<int>(s.sequence.size()) < horizon)
              throw InvalidInput("fixed adversary: sequence shorter than horizon");
            for (const auto& y : s.sequence)
              if (y.size() != space.size()) throw InvalidInput("fixed adversary: reward dimension mismatch");
          }
        },
        spec.kind);
  }

  static RewardFunction draw(const AdversarySpec& spec, const RoundContext& ctx, const StrategyView& strategy,
                             Rng& rng) {
    return std::visit(
        [&](const auto& s) -> RewardFunction {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, RademacherSpec>) {
            return rademacher_round(*ctx.space, rng);
          } else if constexpr (std::is_same_v<S, CenteredSpec>) {
            RewardFunction y = draw(*s.base, ctx, strategy, rng);
            // Rademacher and zigzag rounds already have conditional mean 0;
            // deterministic bases lose their cross-action mean instead.
            const bool mean_zero = std::holds_alternative<RademacherSpec>(s.base->kind) ||
                                   std::holds_alternative<ZigzagSpec>(s.base->kind) ||
                                   std::holds_alternative<CenteredSpec>(s.base->kind);
            const double shift = mean_zero ? 0.0 : y.values.mean();
            return center_adversary({y}, shift).front();
          } else if constexpr (std::is_same_v<S, ZigzagSpec>) {
            return lipschitz_zigzag_round(*ctx.space, s.beta, s.lambda, rng);
          } else if constexpr (std::is_same_v<S, AdaptiveGreedySpec>) {
            return adaptive_greedy_round(strategy(rng), *ctx.cumulative, s.bound);
          } else {
            return s.sequence.at(ctx.t - 1);
          }
        },
        spec.kind);
  }

  AdversarySpec spec_;
  int n_ = 0;
};

}  // namespace tsol
