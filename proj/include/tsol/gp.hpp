#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tsol/core.hpp"
#include "tsol/errors.hpp"
#include "tsol/rng.hpp"
#include "tsol/stats.hpp"

namespace tsol {

enum class KernelFamily { kMaternHalf, kDiagonalWhite };

// Covariance of the virtual adversary.
//   MaternHalf:    k(x, x') = variance * exp(-|x - x'| / lengthscale)
//   DiagonalWhite: k(x, x') = variance * [x == x']
struct KernelSpec {
  KernelFamily family = KernelFamily::kDiagonalWhite;
  double variance = 1.0;
  double lengthscale = 1.0;  // ignored for DiagonalWhite

  static KernelSpec matern_half(double variance, double lengthscale) {
    KernelSpec k{KernelFamily::kMaternHalf, variance, lengthscale};
    k.validate();
    return k;
  }
  static KernelSpec diagonal_white(double variance) {
    KernelSpec k{KernelFamily::kDiagonalWhite, variance, 1.0};
    k.validate();
    return k;
  }

  double sigma() const { return std::sqrt(variance); }

  void validate() const {
    if (!(variance > 0.0) || !std::isfinite(variance)) throw InvalidInput("kernel variance must be positive");
    if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) throw InvalidInput("kernel lengthscale must be positive");
  }

  bool operator==(const KernelSpec&) const = default;

  std::string describe() const {
    if (family == KernelFamily::kDiagonalWhite) return "diagonal_white(variance=" + std::to_string(variance) + ")";
    return "matern_half(variance=" + std::to_string(variance) + ", lengthscale=" + std::to_string(lengthscale) + ")";
  }
};

inline double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                          const Eigen::Ref<const Vector>& xp) {
  const double dist = (x - xp).norm();
  if (spec.family == KernelFamily::kDiagonalWhite) return dist == 0.0 ? spec.variance : 0.0;
  return spec.variance * std::exp(-dist / spec.lengthscale);
}

enum class Definiteness { kSemi, kStrict };

// Rows of `points` are the evaluation points. With kStrict, duplicate points
// (which make K singular) are rejected.
inline Matrix kernel_matrix(const KernelSpec& spec, const Matrix& points,
                            Definiteness definiteness = Definiteness::kSemi) {
  spec.validate();
  const Eigen::Index n = points.rows();
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = spec.variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = kernel_eval(spec, points.row(i).transpose(), points.row(j).transpose());
      if (definiteness == Definiteness::kStrict && (points.row(i) - points.row(j)).norm() == 0.0)
        throw DegenerateMatrix("kernel_matrix: duplicate points " + std::to_string(j) + " and " + std::to_string(i));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

// Lower Cholesky factor of K + jitter*I. Jitter starts at 1e-10 * variance and
// grows x10 up to 1e-6 * variance before giving up.
inline Matrix jittered_cholesky(const Matrix& k, double variance) {
  Matrix work = k;
  double previous = 0.0;
  for (double factor : {1e-10, 1e-9, 1e-8, 1e-7, 1e-6}) {
    const double jitter = factor * variance;
    work.diagonal().array() += jitter - previous;
    previous = jitter;
    Eigen::LLT<Matrix> llt(work);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw DegenerateMatrix("kernel matrix not factorizable within jitter budget");
}

struct GpSample {
  Vector values;
  double scale = 1.0;
};

// Draws from GP(0, k) restricted to a fixed point set. The factorization (if
// any) is computed once, so a sampler can serve every round of a game.
class GpSampler {
 public:
  enum class Method { kAuto, kDiagonal, kMarkov1d, kCholesky };

  static constexpr int kMaxDensePoints = 4096;

  GpSampler(KernelSpec spec, Matrix points, Method method = Method::kAuto)
      : spec_(spec), points_(std::move(points)) {
    spec_.validate();
    if (points_.rows() == 0) throw InvalidInput("GpSampler: no points");
    method_ = method == Method::kAuto ? choose(spec_, points_) : method;
    switch (method_) {
      case Method::kDiagonal:
        if (spec_.family != KernelFamily::kDiagonalWhite) throw InvalidInput("diagonal sampling needs DiagonalWhite");
        break;
      case Method::kMarkov1d:
        check_markov_grid(spec_, points_);
        prepare_markov();
        break;
      case Method::kCholesky:
        if (points_.rows() > kMaxDensePoints)
          throw InvalidInput("GpSampler: dense sampling capped at " + std::to_string(kMaxDensePoints) + " points");
        chol_ = jittered_cholesky(kernel_matrix(spec_, points_), spec_.variance);
        break;
      case Method::kAuto:
        break;
    }
  }

  GpSampler(KernelSpec spec, const ActionSpace& space, Method method = Method::kAuto)
      : GpSampler(spec, space.points(), method) {}

  const KernelSpec& spec() const { return spec_; }
  const Matrix& points() const { return points_; }
  int size() const { return static_cast<int>(points_.rows()); }
  Method method() const { return method_; }

  // out = scale * gamma, gamma ~ GP(0, k). Always consumes size() normals.
  void sample_into(double scale, Rng& rng, Eigen::Ref<Vector> out) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::Index n = points_.rows();
    switch (method_) {
      case Method::kDiagonal: {
        const double s = scale * spec_.sigma();
        for (Eigen::Index i = 0; i < n; ++i) out(i) = s * normal(rng);
        break;
      }
      case Method::kMarkov1d: {
        const double s = scale * spec_.sigma();
        double g = normal(rng);
        out(0) = s * g;
        for (Eigen::Index i = 1; i < n; ++i) {
          g = rho_(i - 1) * g + innovation_(i - 1) * normal(rng);
          out(i) = s * g;
        }
        break;
      }
      default: {
        Vector z(n);
        for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
        out.noalias() = scale * (chol_ * z);
        break;
      }
    }
  }

  Vector sample(double scale, Rng& rng) const {
    Vector out(points_.rows());
    sample_into(scale, rng, out);
    return out;
  }

  // size() x m matrix of independent draws, column by column.
  Matrix sample_batch(int m, double scale, Rng& rng) const {
    Matrix out(points_.rows(), m);
    if (method_ == Method::kCholesky) {
      std::normal_distribution<double> normal(0.0, 1.0);
      Matrix z(points_.rows(), m);
      for (int c = 0; c < m; ++c)
        for (Eigen::Index i = 0; i < points_.rows(); ++i) z(i, c) = normal(rng);
      out.noalias() = scale * (chol_ * z);
      return out;
    }
    for (int c = 0; c < m; ++c) sample_into(scale, rng, out.col(c));
    return out;
  }

  static void check_markov_grid(const KernelSpec& spec, const Matrix& points) {
    if (spec.family != KernelFamily::kMaternHalf) throw InvalidInput("Markov sampling needs a MaternHalf kernel");
    if (points.cols() != 1) throw InvalidInput("Markov sampling needs a 1-d grid");
    for (Eigen::Index i = 1; i < points.rows(); ++i)
      if (points(i, 0) < points(i - 1, 0)) throw InvalidInput("Markov sampling needs an ascending grid");
  }

 private:
  static Method choose(const KernelSpec& spec, const Matrix& points) {
    if (spec.family == KernelFamily::kDiagonalWhite) return Method::kDiagonal;
    if (points.cols() == 1) {
      bool sorted = true;
      for (Eigen::Index i = 1; i < points.rows(); ++i) sorted = sorted && points(i, 0) >= points(i - 1, 0);
      if (sorted) return Method::kMarkov1d;
    }
    return Method::kCholesky;
  }

  void prepare_markov() {
    const Eigen::Index n = points_.rows();
    rho_.resize(std::max<Eigen::Index>(n - 1, 0));
    innovation_.resize(rho_.size());
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const double r = std::exp(-(points_(i + 1, 0) - points_(i, 0)) / spec_.lengthscale);
      rho_(i) = r;
      innovation_(i) = std::sqrt(std::max(0.0, 1.0 - r * r));
    }
  }

  KernelSpec spec_;
  Matrix points_;
  Method method_ = Method::kAuto;
  Matrix chol_;
  Vector rho_;
  Vector innovation_;
};

// Dense-Cholesky draw (any dimension).
inline GpSample sample_gp(const KernelSpec& spec, const Matrix& points, double scale, Rng& rng) {
  GpSampler sampler(spec, points, GpSampler::Method::kCholesky);
  return {sampler.sample(scale, rng), scale};
}

// Exact O(n) draw on a sorted 1-d grid via the Ornstein-Uhlenbeck recursion
// g(x_{i+1}) = rho_i g(x_i) + sigma sqrt(1 - rho_i^2) z_i, rho_i = exp(-(x_{i+1} - x_i)/kappa).
inline GpSample sample_gp_ou_1d(const KernelSpec& spec, const Matrix& grid, double scale, Rng& rng) {
  GpSampler sampler(spec, grid, GpSampler::Method::kMarkov1d);
  return {sampler.sample(scale, rng), scale};
}

inline Estimate expected_sup_mc(const GpSampler& sampler, int n_samples, Rng& rng, double scale = 1.0) {
  if (n_samples < 2) throw InvalidInput("expected_sup_mc: need n_samples >= 2");
  RunningStats stats;
  Vector draw(sampler.size());
  for (int s = 0; s < n_samples; ++s) {
    sampler.sample_into(scale, rng, draw);
    stats.add(draw.maxCoeff());
  }
  return stats.estimate();
}

inline Estimate expected_sup_mc(const KernelSpec& spec, const Matrix& points, int n_samples, Rng& rng) {
  return expected_sup_mc(GpSampler(spec, points), n_samples, rng);
}

// 16 sigma sqrt(d ln(1 + sqrt(d)/kappa)): chaining bound on E sup over [0,1]^d.
inline double dudley_bound(const KernelSpec& spec, int d) {
  spec.validate();
  if (spec.family != KernelFamily::kMaternHalf) throw InvalidInput("dudley_bound: MaternHalf kernel required");
  if (d < 1) throw InvalidInput("dudley_bound: d must be positive");
  const double dd = d;
  return 16.0 * spec.sigma() * std::sqrt(dd * std::log1p(std::sqrt(dd) / spec.lengthscale));
}

// sigma sqrt(2 ln N): maximal inequality for N equal-variance Gaussians.
inline double gaussian_max_bound(double sigma, int n) {
  if (n < 1) throw InvalidInput("gaussian_max_bound: N must be >= 1");
  return sigma * std::sqrt(2.0 * std::log(static_cast<double>(n)));
}

// Closed-form expected modulus of continuity of a MaternHalf GP on [0,1]^d:
// sigma * 32 sqrt(d h / (2 kappa) * ln(20 sqrt(d) / h)); 0 at h = 0.
inline double modulus_bound(const KernelSpec& spec, int d, double h) {
  spec.validate();
  if (spec.family != KernelFamily::kMaternHalf) throw InvalidInput("modulus_bound: MaternHalf kernel required");
  if (h < 0) throw InvalidInput("modulus_bound: h must be nonnegative");
  if (h == 0.0) return 0.0;
  const double dd = d;
  return spec.sigma() * 32.0 * std::sqrt(dd * h / (2.0 * spec.lengthscale) * std::log(20.0 * std::sqrt(dd) / h));
}

// All index pairs i < j with |x_i - x_j| <= h.
inline std::vector<std::pair<int, int>> pairs_within(const Matrix& points, double h) {
  std::vector<std::pair<int, int>> out;
  const double tol = 1e-12;
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    for (Eigen::Index j = i + 1; j < points.rows(); ++j)
      if ((points.row(i) - points.row(j)).norm() <= h + tol) out.emplace_back(static_cast<int>(i), static_cast<int>(j));
  return out;
}

// MC estimate of E sup_{|x - x'| <= h} |gamma(x) - gamma(x')| over the grid.
inline Estimate modulus_of_continuity_mc(const GpSampler& sampler, double h, int n_samples, Rng& rng) {
  if (h < 0) throw InvalidInput("modulus_of_continuity_mc: h must be nonnegative");
  if (n_samples < 2) throw InvalidInput("modulus_of_continuity_mc: need n_samples >= 2");
  const auto pairs = pairs_within(sampler.points(), h);
  RunningStats stats;
  Vector draw(sampler.size());
  for (int s = 0; s < n_samples; ++s) {
    sampler.sample_into(1.0, rng, draw);
    double worst = 0.0;
    for (auto [i, j] : pairs) worst = std::max(worst, std::abs(draw(i) - draw(j)));
    stats.add(worst);
  }
  return stats.estimate();
}

}  // namespace tsol
