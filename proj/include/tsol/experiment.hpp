#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tsol/adversaries.hpp"
#include "tsol/analysis.hpp"
#include "tsol/config.hpp"
#include "tsol/core.hpp"
#include "tsol/gp.hpp"
#include "tsol/learners.hpp"
#include "tsol/parallel.hpp"

namespace tsol {

inline const std::set<std::string>& experiment_keys() {
  static const std::set<std::string> keys = {
      "space.kind",          "space.n",           "space.d",
      "space.points_per_axis", "learner.kind",    "learner.prior.kind",
      "learner.prior.variance", "learner.prior.lengthscale", "learner.eta",
      "adversary.kind",      "adversary.base",    "adversary.beta",
      "adversary.lambda",    "adversary.bound",   "adversary.rewards",
      "game.horizon",        "game.replications", "game.seed",
      "analysis.mc_samples", "analysis.decompose", "analysis.cover_radius",
      "output.path"};
  return keys;
}

struct SpaceConfig {
  std::string kind = "finite";  // finite | cube
  int n = 10;
  int d = 1;
  int points_per_axis = 64;

  ActionSpace build() const { return kind == "finite" ? ActionSpace::finite(n) : ActionSpace::cube_grid(d, points_per_axis); }
};

struct LearnerConfig {
  std::string kind = "thompson";  // thompson | ftpl | exp_weights | uniform
  KernelSpec prior = KernelSpec::diagonal_white(2.0);
  std::optional<double> eta;      // ftpl / exp_weights
  bool eta_sqrt_horizon = false;  // learner.eta = sqrtT
};

struct AdversaryConfig {
  std::string kind = "rademacher";  // rademacher | centered | zigzag | adaptive_greedy | fixed | zero
  std::string base = "rademacher";  // for centered
  double beta = 1.0;
  double lambda = 1.0;
  double bound = 1.0;
  std::vector<std::vector<double>> rewards;  // fixed
};

struct ExperimentConfig {
  SpaceConfig space;
  LearnerConfig learner;
  AdversaryConfig adversary;
  int horizon = 100;
  int replications = 100;
  std::uint64_t seed = 1;
  int mc_samples = 2000;
  bool decompose = false;
  std::optional<double> cover_radius;
  std::string output_path = "out";
};

namespace detail {

inline std::vector<std::vector<double>> parse_reward_rows(const std::string& text, int line) {
  std::vector<std::vector<double>> rows;
  std::stringstream rounds(text);
  std::string round;
  while (std::getline(rounds, round, ';')) {
    std::vector<double> row;
    std::stringstream cells(round);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(RawConfig::parse_double(RawConfig::trim(cell), line, "adversary.rewards"));
    if (row.empty()) throw ConfigError(line, "adversary.rewards: empty round");
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError(line, "adversary.rewards: rounds have different lengths");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError(line, "adversary.rewards: no rounds");
  return rows;
}

inline KernelSpec parse_prior(const RawConfig& raw) {
  const std::string kind = raw.get_string("learner.prior.kind", "diagonal_white");
  const int line = raw.line_of("learner.prior.kind");
  const double variance = raw.get_double("learner.prior.variance", kind == "diagonal_white" ? 2.0 : 1.0);
  const double lengthscale = raw.get_double("learner.prior.lengthscale", 1.0);
  if (!(variance > 0.0)) throw ConfigError(raw.line_of("learner.prior.variance"), "prior variance must be positive");
  if (!(lengthscale > 0.0))
    throw ConfigError(raw.line_of("learner.prior.lengthscale"), "prior lengthscale must be positive");
  if (kind == "diagonal_white") return KernelSpec::diagonal_white(variance);
  if (kind == "matern_half") return KernelSpec::matern_half(variance, lengthscale);
  throw ConfigError(line, "unknown prior kind '" + kind + "' (diagonal_white | matern_half)");
}

}  // namespace detail

inline ExperimentConfig parse_experiment(const RawConfig& raw) {
  ExperimentConfig c;

  c.space.kind = raw.get_string("space.kind", "finite");
  if (c.space.kind != "finite" && c.space.kind != "cube")
    throw ConfigError(raw.line_of("space.kind"), "space.kind must be finite or cube");
  c.space.n = static_cast<int>(raw.get_int("space.n", 10));
  c.space.d = static_cast<int>(raw.get_int("space.d", 1));
  c.space.points_per_axis = static_cast<int>(raw.get_int("space.points_per_axis", 64));
  if (c.space.n < 1) throw ConfigError(raw.line_of("space.n"), "space.n must be >= 1");
  if (c.space.d < 1) throw ConfigError(raw.line_of("space.d"), "space.d must be >= 1");
  if (c.space.points_per_axis < 1)
    throw ConfigError(raw.line_of("space.points_per_axis"), "space.points_per_axis must be >= 1");

  c.learner.kind = raw.get_string("learner.kind", "thompson");
  const std::set<std::string> learners = {"thompson", "ftpl", "exp_weights", "uniform"};
  if (!learners.count(c.learner.kind))
    throw ConfigError(raw.line_of("learner.kind"), "unknown learner '" + c.learner.kind + "'");
  c.learner.prior = detail::parse_prior(raw);
  if (raw.has("learner.eta")) {
    const std::string eta = raw.get_string("learner.eta", "");
    const int line = raw.line_of("learner.eta");
    if (eta == "sqrtT") {
      c.learner.eta_sqrt_horizon = true;
    } else {
      const double v = RawConfig::parse_double(eta, line, "learner.eta");
      if (!(v > 0.0)) throw ConfigError(line, "learner.eta must be positive");
      c.learner.eta = v;
    }
  } else if (c.learner.kind == "ftpl") {
    throw ConfigError(raw.line_of("learner.kind"), "ftpl requires learner.eta");
  }

  c.adversary.kind = raw.get_string("adversary.kind", "rademacher");
  const std::set<std::string> adversaries = {"rademacher", "centered", "zigzag", "adaptive_greedy", "fixed", "zero"};
  const int adv_line = raw.line_of("adversary.kind");
  if (!adversaries.count(c.adversary.kind))
    throw ConfigError(adv_line, "unknown adversary '" + c.adversary.kind + "'");
  c.adversary.base = raw.get_string("adversary.base", "rademacher");
  if (!adversaries.count(c.adversary.base) || c.adversary.base == "centered")
    throw ConfigError(raw.line_of("adversary.base"), "bad centered base '" + c.adversary.base + "'");
  c.adversary.beta = raw.get_double("adversary.beta", 1.0);
  c.adversary.lambda = raw.get_double("adversary.lambda", 1.0);
  c.adversary.bound = raw.get_double("adversary.bound", 1.0);
  if (!(c.adversary.beta > 0.0)) throw ConfigError(raw.line_of("adversary.beta"), "adversary.beta must be positive");
  if (!(c.adversary.lambda >= 0.0))
    throw ConfigError(raw.line_of("adversary.lambda"), "adversary.lambda must be nonnegative");
  if (!(c.adversary.bound > 0.0)) throw ConfigError(raw.line_of("adversary.bound"), "adversary.bound must be positive");
  const bool needs_rewards = c.adversary.kind == "fixed" || (c.adversary.kind == "centered" && c.adversary.base == "fixed");
  if (needs_rewards) {
    if (!raw.has("adversary.rewards")) throw ConfigError(adv_line, "fixed adversary requires adversary.rewards");
    c.adversary.rewards = detail::parse_reward_rows(raw.get_string("adversary.rewards", ""), raw.line_of("adversary.rewards"));
  }

  c.horizon = static_cast<int>(raw.get_int("game.horizon", 100));
  c.replications = static_cast<int>(raw.get_int("game.replications", 100));
  c.seed = raw.get_u64("game.seed", 1);
  if (c.horizon < 1) throw ConfigError(raw.line_of("game.horizon"), "game.horizon must be >= 1");
  if (c.replications < 1) throw ConfigError(raw.line_of("game.replications"), "game.replications must be >= 1");
  c.mc_samples = static_cast<int>(raw.get_int("analysis.mc_samples", 2000));
  if (c.mc_samples < 2) throw ConfigError(raw.line_of("analysis.mc_samples"), "analysis.mc_samples must be >= 2");
  c.decompose = raw.get_bool("analysis.decompose", false);
  if (raw.has("analysis.cover_radius")) {
    const double h = raw.get_double("analysis.cover_radius", 0.0);
    if (!(h >= 0.0)) throw ConfigError(raw.line_of("analysis.cover_radius"), "analysis.cover_radius must be >= 0");
    c.cover_radius = h;
  }
  c.output_path = raw.get_string("output.path", "out");

  // Cross-component compatibility, reported against the kind lines.
  const bool finite = c.space.kind == "finite";
  if (c.learner.kind == "exp_weights" && !finite)
    throw ConfigError(raw.line_of("learner.kind"), "exp_weights requires space.kind = finite");
  const std::string effective = c.adversary.kind == "centered" ? c.adversary.base : c.adversary.kind;
  if ((effective == "rademacher" || effective == "adaptive_greedy") && !finite)
    throw ConfigError(adv_line, effective + " adversary requires space.kind = finite");
  if (effective == "zigzag" && finite) throw ConfigError(adv_line, "zigzag adversary requires space.kind = cube");
  if (effective == "zigzag" && c.adversary.lambda > 0.0 &&
      1.0 / c.space.points_per_axis > 2.0 * c.adversary.beta / c.adversary.lambda)
    throw ConfigError(adv_line, "zigzag adversary: grid spacing exceeds 2*beta/lambda");
  if (effective == "fixed") {
    const int n = finite ? c.space.n : static_cast<int>(std::pow(c.space.points_per_axis, c.space.d));
    if (static_cast<int>(c.adversary.rewards.front().size()) != n)
      throw ConfigError(raw.line_of("adversary.rewards"), "adversary.rewards rounds must have one value per action");
    if (static_cast<int>(c.adversary.rewards.size()) < c.horizon)
      throw ConfigError(raw.line_of("adversary.rewards"), "adversary.rewards has fewer rounds than game.horizon");
  }
  return c;
}

inline ExperimentConfig load_experiment(const std::string& path) {
  return parse_experiment(RawConfig::load(path, experiment_keys()));
}

inline LearnerSpec build_learner_spec(const ExperimentConfig& c) {
  const std::string& k = c.learner.kind;
  if (k == "thompson") return ThompsonSpec{c.learner.prior};
  if (k == "uniform") return UniformSpec{};
  std::optional<double> eta = c.learner.eta;
  if (c.learner.eta_sqrt_horizon) eta = std::sqrt(static_cast<double>(c.horizon));
  if (k == "ftpl") return FtplSpec{c.learner.prior, *eta};
  return ExpWeightsSpec{eta};
}

inline AdversarySpec build_adversary_spec(const ExperimentConfig& c, const ActionSpace& space) {
  auto simple = [&](const std::string& kind) -> AdversarySpec {
    if (kind == "rademacher") return {RademacherSpec{}};
    if (kind == "zigzag") return {ZigzagSpec{c.adversary.beta, c.adversary.lambda}};
    if (kind == "adaptive_greedy") return {AdaptiveGreedySpec{c.adversary.bound}};
    FixedSpec f;
    if (kind == "zero") {
      f.sequence.assign(c.horizon, RewardFunction::zeros(space.size()));
    } else {
      for (const auto& row : c.adversary.rewards)
        f.sequence.emplace_back(Eigen::Map<const Vector>(row.data(), static_cast<Eigen::Index>(row.size())));
    }
    return {std::move(f)};
  };
  if (c.adversary.kind == "centered") return centered(simple(c.adversary.base));
  return simple(c.adversary.kind);
}

// Matching closed-form regret bound for the configured game, when one applies.
struct BoundInfo {
  std::optional<double> value;
  std::string formula;
  double beta = 0.0;
  double coupling_C = 0.0;
  std::optional<double> lipschitz_corollary;  // at the corollary's parameter choices
};

inline BoundInfo theoretical_bound(const ExperimentConfig& c, const ActionSpace& space, const AdversarySpec& adv,
                                   const LearnerSpec& learner) {
  BoundInfo info;
  const double horizon = c.horizon;
  const auto sup = Adversary::sup_bound(adv);
  const bool finite = space.is_finite();
  const int n = space.size();
  const KernelSpec& prior = c.learner.prior;
  if (!sup) return info;
  info.beta = *sup;

  if (finite && (c.learner.kind == "thompson" || c.learner.kind == "ftpl") &&
      prior.family == KernelFamily::kDiagonalWhite) {
    // Condition holds with C = beta for the white kernel.
    info.coupling_C = info.beta;
    const double unit = n >= 2 ? gaussian_max_bound(1.0, n) : 0.0;
    if (c.learner.kind == "thompson") {
      info.value = thompson_regret_bound(horizon, info.beta, info.coupling_C, prior.sigma(), unit);
      info.formula = "sqrt(T)(sigma + beta(beta+C)/sigma) sqrt(2 ln N), C = beta";
    } else {
      const double eta = std::get<FtplSpec>(learner).eta;
      info.value = ftpl_regret_bound(horizon, eta, info.beta, info.coupling_C, prior.sigma(), unit);
      info.formula = "(eta sigma + T beta(beta+C)/(2 eta sigma)) sqrt(2 ln N), C = beta";
    }
    return info;
  }
  if (finite && c.learner.kind == "exp_weights") {
    const double eta = *std::get<ExpWeightsSpec>(learner).eta;
    if (n >= 2) {
      info.value = std::log(static_cast<double>(n)) / eta + eta * horizon * (2.0 * info.beta) * (2.0 * info.beta) / 8.0;
      info.formula = "ln N / eta + eta T (2 beta)^2 / 8";
    }
    return info;
  }
  const auto* zig = std::get_if<ZigzagSpec>(&adv.kind);
  if (!zig) {
    if (const auto* cen = std::get_if<CenteredSpec>(&adv.kind)) zig = std::get_if<ZigzagSpec>(&cen->base->kind);
  }
  if (!finite && c.learner.kind == "thompson" && prior.family == KernelFamily::kMaternHalf && zig) {
    const double beta = zig->beta;
    const double lambda = zig->lambda;
    info.beta = beta;
    info.coupling_C = hessian_constant(beta, lambda, prior.lengthscale);
    const double unit = dudley_bound(KernelSpec::matern_half(1.0, prior.lengthscale), space.dimension());
    info.value = thompson_regret_bound(horizon, beta, info.coupling_C, prior.sigma(), unit);
    info.formula = "sqrt(T)(sigma + beta(beta+C)/sigma) * 16 sqrt(d ln(1 + sqrt(d)/kappa)), C = 2beta/(1-exp(-2beta/(lambda kappa+beta)))";
    if (lambda > 0.0) info.lipschitz_corollary = regret_bound_lipschitz(horizon, space.dimension(), beta, lambda);
  }
  return info;
}

struct ReplicationResult {
  int replication = 0;
  std::uint64_t seed = 0;
  double regret = 0.0;
  double cover_budget = 0.0;
};

struct SimulationResult {
  ExperimentConfig config;
  std::vector<ReplicationResult> replications;
  Estimate regret;
  BoundInfo bound;
  std::optional<bool> bound_satisfied;
  std::optional<Estimate> prior_regret;
  std::uint64_t prior_regret_seed = 0;
  double cover_radius = 0.0;
  double cover_budget = 0.0;  // largest over replications
  Trajectory first;
  std::optional<DecompositionEstimate> decomposition;
  std::uint64_t decomposition_seed = 0;
};

inline std::uint64_t replication_seed(std::uint64_t seed, int r) {
  return derive_seed(seed, {kReplicationStream, static_cast<std::uint64_t>(r)});
}

inline SimulationResult run_simulation(const ExperimentConfig& config, int threads = 1) {
  SimulationResult res;
  res.config = config;
  const ActionSpace space = config.space.build();
  const LearnerSpec learner_spec = build_learner_spec(config);
  const AdversarySpec adversary_spec = build_adversary_spec(config, space);
  const Learner learner(learner_spec, space, config.horizon);
  const Adversary adversary(adversary_spec, space, config.horizon);

  const bool grid = !space.is_finite();
  const bool matern = config.learner.prior.family == KernelFamily::kMaternHalf;
  res.cover_radius = grid ? config.cover_radius.value_or(space.grid_radius()) : 0.0;

  res.replications = parallel_map(static_cast<std::size_t>(config.replications), threads, [&](std::size_t r) {
    ReplicationResult out;
    out.replication = static_cast<int>(r);
    out.seed = replication_seed(config.seed, out.replication);
    const Trajectory tr = play_game(learner, adversary, space, config.horizon, out.seed);
    out.regret = realized_regret(tr);
    if (grid && matern) {
      const auto omega = trajectory_moduli(tr, space, res.cover_radius);
      out.cover_budget = cover_error_budget(res.cover_radius, config.learner.prior, space.dimension(), omega, config.horizon);
    }
    return out;
  });
  res.first = play_game(learner, adversary, space, config.horizon, res.replications.front().seed);

  RunningStats stats;
  for (const auto& r : res.replications) {
    stats.add(r.regret);
    res.cover_budget = std::max(res.cover_budget, r.cover_budget);
  }
  res.regret = stats.estimate();

  res.bound = theoretical_bound(config, space, adversary_spec, learner_spec);
  if (res.bound.value)
    res.bound_satisfied = res.regret.value + 3.0 * res.regret.std_error + res.cover_budget <= *res.bound.value;

  if (const GpSampler* prior = learner.prior_sampler(); prior && config.learner.kind == "thompson") {
    res.prior_regret_seed = derive_seed(config.seed, {kAnalysisStream, 0});
    Rng rng(res.prior_regret_seed);
    res.prior_regret = expected_sup_mc(*prior, config.mc_samples, rng, std::sqrt(static_cast<double>(config.horizon)));
    if (config.decompose) {
      res.decomposition_seed = derive_seed(config.seed, {kAnalysisStream, 1});
      Rng drng(res.decomposition_seed);
      res.decomposition = decompose_regret(res.first, *prior, learner_spec, config.mc_samples, drng);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json estimate_json(const Estimate& e, std::uint64_t seed) {
  return {{"value", e.value}, {"stderr", e.std_error}, {"n", e.n}, {"seed", seed}};
}

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// FNV-1a over the IEEE bytes of a reward vector.
inline std::uint64_t fnv1a(const Vector& v) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(v.data());
  for (std::size_t i = 0; i < static_cast<std::size_t>(v.size()) * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline nlohmann::json decomposition_json(const DecompositionEstimate& d, std::uint64_t seed) {
  nlohmann::json j;
  j["prior_regret"] = estimate_json(d.prior_regret, seed);
  j["total_excess"] = estimate_json(d.total_excess, seed);
  j["total_bregman"] = estimate_json(d.total_bregman, seed);
  j["excess_minus_bregman"] = estimate_json(d.excess_minus_bregman, seed);
  j["implied_regret"] = estimate_json(d.implied_regret(), seed);
  j["best_in_hindsight"] = d.best_in_hindsight;
  nlohmann::json rounds = nlohmann::json::array();
  for (std::size_t t = 0; t < d.per_round_excess.size(); ++t) {
    rounds.push_back({{"t", t + 1},
                      {"E_t", estimate_json(d.per_round_excess[t], seed)},
                      {"D_t", estimate_json(d.per_round_bregman[t], seed)},
                      {"collected", estimate_json(d.per_round_collected[t], seed)}});
  }
  j["rounds"] = rounds;
  return j;
}

inline nlohmann::json summary_json(const SimulationResult& r) {
  nlohmann::json j;
  j["learner"] = r.config.learner.kind;
  j["adversary"] = r.config.adversary.kind;
  j["horizon"] = r.config.horizon;
  j["replications"] = r.config.replications;
  j["seed"] = r.config.seed;
  j["mean_regret"] = r.regret.value;
  j["stderr"] = r.regret.std_error;
  j["n"] = r.regret.n;
  j["bound"] = r.bound.value ? nlohmann::json(*r.bound.value) : nlohmann::json(nullptr);
  j["bound_formula"] = r.bound.formula;
  j["bound_beta"] = r.bound.beta;
  j["bound_C"] = r.bound.coupling_C;
  j["lipschitz_corollary_bound"] =
      r.bound.lipschitz_corollary ? nlohmann::json(*r.bound.lipschitz_corollary) : nlohmann::json(nullptr);
  j["bound_satisfied"] = r.bound_satisfied ? nlohmann::json(*r.bound_satisfied) : nlohmann::json(nullptr);
  j["cover_radius"] = r.cover_radius;
  j["cover_error_budget"] = r.cover_budget;
  j["prior_regret"] = r.prior_regret ? estimate_json(*r.prior_regret, r.prior_regret_seed) : nlohmann::json(nullptr);
  if (r.bound.value && *r.bound.value > 0) j["regret_to_bound_ratio"] = r.regret.value / *r.bound.value;
  return j;
}

inline void write_simulation_outputs(const SimulationResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "replications.csv", std::ios::binary);
    csv << "replication,seed,regret\r\n";
    for (const auto& rep : r.replications)
      csv << rep.replication << ',' << rep.seed << ',' << format_double(rep.regret) << "\r\n";
  }
  {
    std::ofstream js(dir / "summary.json", std::ios::binary);
    js << summary_json(r).dump(2) << '\n';
  }
  {
    std::ofstream jl(dir / "trajectory.jsonl", std::ios::binary);
    char hash[20];
    for (int t = 0; t < r.first.horizon; ++t) {
      std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(r.first.rewards[t].values)));
      nlohmann::json line = {{"t", t + 1},
                             {"action", r.first.actions[t]},
                             {"reward", r.first.rewards[t][r.first.actions[t]]},
                             {"reward_hash", hash}};
      jl << line.dump() << '\n';
    }
  }
  if (r.decomposition) {
    std::ofstream js(dir / "decomposition.json", std::ios::binary);
    js << decomposition_json(*r.decomposition, r.decomposition_seed).dump(2) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
  std::string axis;
  double value = 0.0;
  Estimate regret;
  std::optional<double> bound;
};

inline ExperimentConfig apply_sweep_value(ExperimentConfig c, const std::string& axis, double value) {
  if (axis == "T") {
    if (value < 1 || value != std::floor(value)) throw InvalidInput("sweep T values must be positive integers");
    c.horizon = static_cast<int>(value);
  } else if (axis == "N") {
    if (c.space.kind != "finite") throw InvalidInput("sweep over N requires space.kind = finite");
    if (value < 1 || value != std::floor(value)) throw InvalidInput("sweep N values must be positive integers");
    c.space.n = static_cast<int>(value);
  } else if (axis == "lambda") {
    const bool zig = c.adversary.kind == "zigzag" || (c.adversary.kind == "centered" && c.adversary.base == "zigzag");
    if (!zig) throw InvalidInput("sweep over lambda requires the zigzag adversary");
    if (value < 0) throw InvalidInput("sweep lambda values must be nonnegative");
    c.adversary.lambda = value;
  } else if (axis == "kappa") {
    if (c.learner.prior.family != KernelFamily::kMaternHalf) throw InvalidInput("sweep over kappa requires a MaternHalf prior");
    if (!(value > 0)) throw InvalidInput("sweep kappa values must be positive");
    c.learner.prior.lengthscale = value;
  } else {
    throw InvalidInput("unknown sweep axis '" + axis + "' (T | N | lambda | kappa)");
  }
  return c;
}

inline std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const std::string& axis,
                                       const std::vector<double>& values, int threads = 1) {
  if (values.empty()) throw InvalidInput("sweep needs at least one value");
  std::vector<ExperimentConfig> configs;
  for (double v : values) configs.push_back(apply_sweep_value(base, axis, v));
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    ExperimentConfig c = configs[i];
    c.decompose = false;
    const auto res = run_simulation(c, threads);
    rows.push_back({axis, values[i], res.regret, res.bound.value});
  }
  return rows;
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream csv(file, std::ios::binary);
  csv << "axis,value,mean_regret,stderr,bound\r\n";
  for (const auto& r : rows)
    csv << r.axis << ',' << format_double(r.value) << ',' << format_double(r.regret.value) << ','
        << format_double(r.regret.std_error) << ',' << (r.bound ? format_double(*r.bound) : "") << "\r\n";
}

}  // namespace tsol
