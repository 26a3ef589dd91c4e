#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsol/errors.hpp"
#include "tsol/rng.hpp"

namespace tsol {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Learner's action domain: a finite index set, or the midpoint lattice
// {(2l+1)/(2n)}^d of the unit cube. Points are stored one per row; finite
// actions use their index as a 1-d coordinate.
class ActionSpace {
 public:
  enum class Kind { kFinite, kCubeGrid };

  static ActionSpace finite(int n) {
    if (n < 1) throw InvalidInput("finite action space needs n >= 1");
    ActionSpace s;
    s.kind_ = Kind::kFinite;
    s.dim_ = 1;
    s.per_axis_ = n;
    s.points_.resize(n, 1);
    for (int i = 0; i < n; ++i) s.points_(i, 0) = i;
    return s;
  }

  // Axis 0 varies fastest, so for d = 1 the points are sorted ascending.
  static ActionSpace cube_grid(int d, int points_per_axis) {
    if (d < 1) throw InvalidInput("cube grid needs d >= 1");
    if (points_per_axis < 1) throw InvalidInput("cube grid needs points_per_axis >= 1");
    double total = std::pow(static_cast<double>(points_per_axis), d);
    if (total > 1e7) throw InvalidInput("cube grid too large");
    ActionSpace s;
    s.kind_ = Kind::kCubeGrid;
    s.dim_ = d;
    s.per_axis_ = points_per_axis;
    const int n = static_cast<int>(total);
    s.points_.resize(n, d);
    for (int i = 0; i < n; ++i) {
      int rest = i;
      for (int k = 0; k < d; ++k) {
        const int l = rest % points_per_axis;
        rest /= points_per_axis;
        s.points_(i, k) = (2.0 * l + 1.0) / (2.0 * points_per_axis);
      }
    }
    return s;
  }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::kFinite; }
  int size() const { return static_cast<int>(points_.rows()); }
  int dimension() const { return dim_; }
  int points_per_axis() const { return per_axis_; }
  const Matrix& points() const { return points_; }

  // Cover radius of the lattice: half the spacing times sqrt(d); 0 for finite sets.
  double grid_radius() const {
    return kind_ == Kind::kFinite ? 0.0 : std::sqrt(static_cast<double>(dim_)) / (2.0 * per_axis_);
  }
  double spacing() const { return kind_ == Kind::kFinite ? 1.0 : 1.0 / per_axis_; }

  // Index pairs of lattice neighbours (one step along a single axis).
  std::vector<std::pair<int, int>> neighbor_pairs() const {
    std::vector<std::pair<int, int>> out;
    if (kind_ == Kind::kFinite) return out;
    int stride = 1;
    for (int k = 0; k < dim_; ++k) {
      for (int i = 0; i < size(); ++i) {
        const int l = (i / stride) % per_axis_;
        if (l + 1 < per_axis_) out.emplace_back(i, i + stride);
      }
      stride *= per_axis_;
    }
    return out;
  }

  std::string describe() const {
    if (kind_ == Kind::kFinite) return "finite(" + std::to_string(per_axis_) + ")";
    return "cube(d=" + std::to_string(dim_) + ", n=" + std::to_string(per_axis_) + ")";
  }

 private:
  ActionSpace() = default;
  Kind kind_ = Kind::kFinite;
  int dim_ = 1;
  int per_axis_ = 1;
  Matrix points_;
};

// One round's payoff, evaluated at every point of the action space.
struct RewardFunction {
  Vector values;

  RewardFunction() = default;
  explicit RewardFunction(Vector v) : values(std::move(v)) {}
  static RewardFunction zeros(int n) { return RewardFunction(Vector::Zero(n)); }

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values(i); }
  double sup_norm() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
};

// Largest |y(x) - y(x')| / |x - x'| over lattice neighbours.
inline double grid_lipschitz_constant(const RewardFunction& y, const ActionSpace& space) {
  double worst = 0.0;
  const double h = space.spacing();
  for (auto [i, j] : space.neighbor_pairs()) worst = std::max(worst, std::abs(y[i] - y[j]) / h);
  return worst;
}

struct ArgMax {
  int index = 0;
  double value = 0.0;
};

// Smallest index wins exact ties.
inline ArgMax best_in_hindsight(const Eigen::Ref<const Vector>& cumulative) {
  if (cumulative.size() == 0) throw InvalidInput("best_in_hindsight: empty vector");
  ArgMax best{0, cumulative(0)};
  for (Eigen::Index i = 1; i < cumulative.size(); ++i) {
    if (cumulative(i) > best.value) best = {static_cast<int>(i), cumulative(i)};
  }
  return best;
}

inline int argmax_index(const Eigen::Ref<const Vector>& v) { return best_in_hindsight(v).index; }

// Full game record. cumulative[t] = y_1 + ... + y_t, cumulative[0] = 0.
struct Trajectory {
  int horizon = 0;
  std::uint64_t seed = 0;
  std::vector<int> actions;
  std::vector<RewardFunction> rewards;
  std::vector<Vector> cumulative;

  double collected() const {
    double total = 0.0;
    for (int t = 0; t < horizon; ++t) total += rewards[t][actions[t]];
    return total;
  }
};

// Builds a trajectory from a reward sequence and the actions played.
inline Trajectory make_trajectory(std::vector<RewardFunction> rewards, std::vector<int> actions,
                                  std::uint64_t seed = 0) {
  if (rewards.empty()) throw InvalidInput("trajectory needs at least one round");
  if (rewards.size() != actions.size()) throw InvalidInput("trajectory: rewards/actions length mismatch");
  const int n = rewards.front().size();
  Trajectory tr;
  tr.horizon = static_cast<int>(rewards.size());
  tr.seed = seed;
  tr.cumulative.reserve(rewards.size() + 1);
  tr.cumulative.push_back(Vector::Zero(n));
  for (std::size_t t = 0; t < rewards.size(); ++t) {
    if (rewards[t].size() != n) throw InvalidInput("trajectory: reward dimension changes between rounds");
    if (actions[t] < 0 || actions[t] >= n) throw InvalidInput("trajectory: action index out of range");
    tr.cumulative.push_back(tr.cumulative.back() + rewards[t].values);
  }
  tr.rewards = std::move(rewards);
  tr.actions = std::move(actions);
  return tr;
}

inline double realized_regret(const Trajectory& tr) {
  return best_in_hindsight(tr.cumulative.at(tr.horizon)).value - tr.collected();
}

struct RegretReport {
  double realized_regret = 0.0;
  double best_in_hindsight_value = 0.0;
  double prior_regret = 0.0;
  double prior_regret_stderr = 0.0;
  double excess_regret = 0.0;
  double excess_regret_stderr = 0.0;
  double bregman_sum = 0.0;
  double bregman_sum_stderr = 0.0;
  double bound_value = 0.0;
};

// What a player may see at round t: the history y_1..y_{t-1}, x_1..x_{t-1}.
struct RoundContext {
  int t = 1;
  int horizon = 1;
  const ActionSpace* space = nullptr;
  const Vector* cumulative = nullptr;
  std::span<const RewardFunction> past_rewards;
  std::span<const int> past_actions;
};

// The learner's sampling rule at the current round, as exposed to the
// adversary. Evaluating it never reveals the realized action.
using StrategyView = std::function<std::vector<double>(Rng&)>;

template <class L>
concept LearnerLike = requires(const L& l, const RoundContext& ctx, Rng& rng, const ActionSpace& s) {
  { l.act(ctx, rng) } -> std::convertible_to<int>;
  { l.action_probabilities(ctx, rng) } -> std::convertible_to<std::vector<double>>;
  { l.compatible_with(s) } -> std::convertible_to<bool>;
};

template <class A>
concept AdversaryLike =
    requires(const A& a, const RoundContext& ctx, const StrategyView& view, Rng& rng, const ActionSpace& s) {
      { a.next(ctx, view, rng) } -> std::convertible_to<RewardFunction>;
      { a.compatible_with(s) } -> std::convertible_to<bool>;
    };

// Plays T rounds. Each round the adversary commits y_t knowing the history
// and the learner's sampling rule, then the learner draws x_t from y_{1:t-1}
// alone. Round t uses RNG streams (seed, learner, t) and (seed, adversary, t).
template <LearnerLike L, AdversaryLike A>
Trajectory play_game(const L& learner, const A& adversary, const ActionSpace& space, int horizon,
                     std::uint64_t seed) {
  if (horizon < 1) throw InvalidInput("play_game: horizon must be >= 1");
  if (!learner.compatible_with(space)) throw InvalidInput("play_game: learner incompatible with " + space.describe());
  if (!adversary.compatible_with(space))
    throw InvalidInput("play_game: adversary incompatible with " + space.describe());

  const int n = space.size();
  Trajectory tr;
  tr.horizon = horizon;
  tr.seed = seed;
  tr.actions.reserve(horizon);
  tr.rewards.reserve(horizon);
  tr.cumulative.reserve(horizon + 1);
  tr.cumulative.push_back(Vector::Zero(n));

  for (int t = 1; t <= horizon; ++t) {
    RoundContext ctx;
    ctx.t = t;
    ctx.horizon = horizon;
    ctx.space = &space;
    ctx.cumulative = &tr.cumulative.back();
    ctx.past_rewards = std::span<const RewardFunction>(tr.rewards);
    ctx.past_actions = std::span<const int>(tr.actions);

    const StrategyView view = [&learner, &ctx](Rng& r) { return learner.action_probabilities(ctx, r); };
    Rng adversary_rng = make_stream(seed, {kAdversaryStream, static_cast<std::uint64_t>(t)});
    RewardFunction y = adversary.next(ctx, view, adversary_rng);
    if (y.size() != n) throw InvalidInput("play_game: adversary reward has wrong dimension");

    Rng learner_rng = make_stream(seed, {kLearnerStream, static_cast<std::uint64_t>(t)});
    const int x = learner.act(ctx, learner_rng);
    if (x < 0 || x >= n) throw InvalidInput("play_game: learner action out of range");

    Vector next = tr.cumulative.back() + y.values;
    tr.actions.push_back(x);
    tr.rewards.push_back(std::move(y));
    tr.cumulative.push_back(std::move(next));
  }
  return tr;
}

}  // namespace tsol
