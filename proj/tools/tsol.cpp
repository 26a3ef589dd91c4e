// Command-line runner: simulate, verify, sweep, bounds, sample-gp.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tsol/analysis.hpp"
#include "tsol/experiment.hpp"
#include "tsol/gp.hpp"
#include "tsol/verification.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 1;
};

tsol::ExperimentConfig load(const Common& c) {
  if (c.config.empty()) throw tsol::ConfigError(0, "--config is required");
  auto cfg = tsol::load_experiment(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.output_path = c.out;
  return cfg;
}

int cmd_simulate(const Common& c) {
  const auto cfg = load(c);
  const auto res = tsol::run_simulation(cfg, c.threads);
  tsol::write_simulation_outputs(res, cfg.output_path);
  std::cout << tsol::summary_json(res).dump(2) << '\n';
  return kExitOk;
}

int cmd_sweep(const Common& c, const std::string& axis, const std::vector<double>& values) {
  const auto cfg = load(c);
  const auto rows = tsol::run_sweep(cfg, axis, values, c.threads);
  const auto file = std::filesystem::path(cfg.output_path) / "sweep.csv";
  tsol::write_sweep_csv(rows, file);
  std::ifstream in(file, std::ios::binary);
  std::cout << in.rdbuf();
  return kExitOk;
}

int cmd_verify(const std::string& suite, const Common& c) {
  tsol::VerifyOptions opt;
  if (c.seed) opt.seed = *c.seed;
  const auto reports = tsol::run_verify(suite, opt);
  nlohmann::json out = nlohmann::json::array();
  bool ok = true;
  for (const auto& r : reports) {
    out.push_back(r.to_json());
    ok = ok && r.passed();
    for (const auto& chk : r.checks)
      std::cerr << (chk.passed ? "PASS " : "FAIL ") << r.suite << ": " << chk.name << '\n';
  }
  const std::string text = out.dump(2);
  if (!c.out.empty()) {
    std::filesystem::create_directories(c.out);
    std::ofstream(std::filesystem::path(c.out) / "verify.json", std::ios::binary) << text << '\n';
  }
  std::cout << text << '\n';
  return ok ? kExitOk : kExitFailed;
}

struct BoundArgs {
  double horizon = 1000;
  int n = 10;
  int d = 1;
  double beta = 1.0;
  double lambda = 1.0;
  std::optional<double> eta;
  double sigma = std::sqrt(2.0);
};

int cmd_bounds(const BoundArgs& a) {
  if (a.eta && !(*a.eta > 0.0)) throw tsol::InvalidInput("--eta must be positive");
  nlohmann::json j;
  j["T"] = a.horizon;
  j["N"] = a.n;
  j["d"] = a.d;
  j["beta"] = a.beta;
  j["lambda"] = a.lambda;
  j["finite_thompson"] = tsol::regret_bound_finite(a.horizon, a.n);
  const double unit = tsol::gaussian_max_bound(1.0, a.n);
  j["finite_thompson_general"] = tsol::thompson_regret_bound(a.horizon, a.beta, a.beta, a.sigma, unit);
  const double eta = a.eta.value_or(std::sqrt(a.horizon));
  j["ftpl_eta"] = eta;
  j["ftpl_finite"] = tsol::ftpl_regret_bound(a.horizon, eta, a.beta, a.beta, a.sigma, unit);
  j["ftpl_matching_rate"] = 2.0 * std::sqrt(a.horizon * std::log(static_cast<double>(a.n)));
  j["lipschitz"] = tsol::regret_bound_lipschitz(a.horizon, a.d, a.beta, a.lambda);
  if (a.lambda > 0) {
    const double kappa = a.beta / a.lambda;
    const double c = tsol::hessian_constant(a.beta, a.lambda, kappa);
    j["lipschitz_kappa"] = kappa;
    j["lipschitz_sigma"] = a.beta;
    j["coupling_C"] = c;
    j["coupling_C_alternative"] = tsol::hessian_constant_alternative(a.beta, a.lambda, kappa);
    j["lipschitz_via_general_theorem"] = tsol::thompson_regret_bound(
        a.horizon, a.beta, c, a.beta, tsol::dudley_bound(tsol::KernelSpec::matern_half(1.0, kappa), a.d));
    j["dudley_unit"] = tsol::dudley_bound(tsol::KernelSpec::matern_half(1.0, kappa), a.d);
  }
  j["gaussian_max"] = tsol::gaussian_max_bound(a.sigma, a.n);
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

struct SampleArgs {
  std::string kernel = "matern_half";
  double variance = 1.0;
  double lengthscale = 1.0;
  int d = 1;
  int points_per_axis = 64;
  int draws = 1;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_sample_gp(const SampleArgs& a) {
  const tsol::KernelSpec spec = a.kernel == "diagonal_white" ? tsol::KernelSpec::diagonal_white(a.variance)
                                : a.kernel == "matern_half"  ? tsol::KernelSpec::matern_half(a.variance, a.lengthscale)
                                                             : throw tsol::InvalidInput("unknown kernel '" + a.kernel + "'");
  if (a.draws < 1) throw tsol::InvalidInput("--draws must be >= 1");
  const auto space = tsol::ActionSpace::cube_grid(a.d, a.points_per_axis);
  const tsol::GpSampler sampler(spec, space);
  tsol::Rng rng = tsol::make_stream(a.seed, {tsol::kAnalysisStream});
  const tsol::Matrix draws = sampler.sample_batch(a.draws, 1.0, rng);
  std::ostringstream csv;
  for (int k = 0; k < a.d; ++k) csv << "x" << k << ',';
  for (int s = 0; s < a.draws; ++s) csv << "draw" << s << (s + 1 < a.draws ? "," : "\r\n");
  for (int i = 0; i < space.size(); ++i) {
    for (int k = 0; k < a.d; ++k) csv << tsol::format_double(space.points()(i, k)) << ',';
    for (int s = 0; s < a.draws; ++s) csv << tsol::format_double(draws(i, s)) << (s + 1 < a.draws ? "," : "\r\n");
  }
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    const std::filesystem::path p(a.out);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << csv.str();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thompson sampling / perturbed-leader regret experiments"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool config) {
    if (config) sub->add_option("--config", common.config, "experiment config (key = value)")->required();
    sub->add_option("--seed", common.seed, "override game.seed / suite seed");
    sub->add_option("--out", common.out, "output directory");
    sub->add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
  };

  auto* simulate = app.add_subcommand("simulate", "run replications and write CSV/JSON");
  add_common(simulate, true);

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run an invariant suite");
  verify->add_option("suite", suite, "decomposition | bregman | hessian | truncnorm | chaining | all")->required();
  add_common(verify, false);

  std::string axis;
  std::vector<double> values;
  auto* sweep = app.add_subcommand("sweep", "one simulation per axis value, long-format CSV");
  add_common(sweep, true);
  sweep->add_option("--axis", axis, "T | N | lambda | kappa")->required();
  sweep->add_option("--values", values, "axis values")->required()->delimiter(',');

  BoundArgs bargs;
  auto* bounds = app.add_subcommand("bounds", "print closed-form bounds");
  bounds->add_option("--T", bargs.horizon)->check(CLI::NonNegativeNumber);
  bounds->add_option("--N", bargs.n)->check(CLI::Range(2, 1 << 30));
  bounds->add_option("--d", bargs.d)->check(CLI::PositiveNumber);
  bounds->add_option("--beta", bargs.beta)->check(CLI::PositiveNumber);
  bounds->add_option("--lambda", bargs.lambda)->check(CLI::NonNegativeNumber);
  bounds->add_option("--eta", bargs.eta, "FTPL learning rate (default sqrt(T))");
  bounds->add_option("--sigma", bargs.sigma, "finite-case prior standard deviation")->check(CLI::PositiveNumber);

  SampleArgs sargs;
  auto* sample = app.add_subcommand("sample-gp", "export GP prior draws on a grid as CSV");
  sample->add_option("--kernel", sargs.kernel, "matern_half | diagonal_white");
  sample->add_option("--variance", sargs.variance);
  sample->add_option("--lengthscale", sargs.lengthscale);
  sample->add_option("--d", sargs.d);
  sample->add_option("--points-per-axis", sargs.points_per_axis);
  sample->add_option("--draws", sargs.draws);
  sample->add_option("--seed", sargs.seed);
  sample->add_option("--out", sargs.out, "CSV file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(common);
    if (*verify) return cmd_verify(suite, common);
    if (*sweep) return cmd_sweep(common, axis, values);
    if (*bounds) return cmd_bounds(bargs);
    if (*sample) return cmd_sample_gp(sargs);
  } catch (const tsol::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const tsol::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
