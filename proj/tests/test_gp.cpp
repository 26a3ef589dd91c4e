#include <gtest/gtest.h>

#include <cmath>

#include "tsol/gp.hpp"
#include "tsol/stats.hpp"

using namespace tsol;

namespace {

Matrix line(std::initializer_list<double> xs) {
  Matrix m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

double correlation(const Matrix& draws, int i, int j) {
  const double mi = draws.row(i).mean(), mj = draws.row(j).mean();
  const auto a = draws.row(i).array() - mi;
  const auto b = draws.row(j).array() - mj;
  return (a * b).sum() / std::sqrt((a * a).sum() * (b * b).sum());
}

}  // namespace

TEST(Kernel, Evaluation) {
  const auto m = KernelSpec::matern_half(1.0, 1.0);
  Vector x(1), y(1);
  x << 0.3;
  y << 1.3;
  EXPECT_DOUBLE_EQ(kernel_eval(m, x, x), 1.0);
  EXPECT_NEAR(kernel_eval(m, x, y), 0.36787944117144233, 1e-15);
  EXPECT_EQ(kernel_eval(KernelSpec::diagonal_white(2.0), x, y), 0.0);
  EXPECT_EQ(kernel_eval(KernelSpec::diagonal_white(2.0), x, x), 2.0);
  EXPECT_THROW(KernelSpec::matern_half(0.0, 1.0), InvalidInput);
  EXPECT_THROW(KernelSpec::matern_half(1.0, -1.0), InvalidInput);
}

TEST(Kernel, Matrices) {
  const auto k1 = kernel_matrix(KernelSpec::matern_half(3.0, 1.0), line({0.5}));
  ASSERT_EQ(k1.rows(), 1);
  EXPECT_EQ(k1(0, 0), 3.0);
  const auto kw = kernel_matrix(KernelSpec::diagonal_white(2.0), line({0, 1, 2}));
  EXPECT_TRUE(kw.isApprox(2.0 * Matrix::Identity(3, 3)));
  const auto km = kernel_matrix(KernelSpec::matern_half(1.0, 1.0), line({0, 1}));
  EXPECT_EQ(km(0, 0), 1.0);
  EXPECT_NEAR(km(0, 1), std::exp(-1.0), 1e-15);
  EXPECT_EQ(km(0, 1), km(1, 0));
  EXPECT_THROW(kernel_matrix(KernelSpec::matern_half(1.0, 1.0), line({0, 0}), Definiteness::kStrict), DegenerateMatrix);
}

TEST(Kernel, SymmetricWithExactDiagonalAndNoNegativeSpectrum) {
  const auto grid = ActionSpace::cube_grid(2, 8);
  const auto spec = KernelSpec::matern_half(2.5, 0.3);
  const auto k = kernel_matrix(spec, grid.points());
  EXPECT_TRUE(k.isApprox(k.transpose(), 0.0));
  for (Eigen::Index i = 0; i < k.rows(); ++i) EXPECT_EQ(k(i, i), 2.5);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(k);
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-8 * 2.5);
}

TEST(Jitter, GivesUpOnIndefiniteMatrix) {
  Matrix k(2, 2);
  k << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(jittered_cholesky(k, 1.0), DegenerateMatrix);
  Matrix dup = Matrix::Constant(2, 2, 1.0);  // rank 1, repaired by jitter
  EXPECT_NO_THROW(jittered_cholesky(dup, 1.0));
}

TEST(SampleGp, ZeroScaleIsZero) {
  Rng rng(1);
  EXPECT_TRUE(sample_gp(KernelSpec::matern_half(1.0, 1.0), line({0, 0.5, 1}), 0.0, rng).values.isZero());
}

TEST(SampleGp, WhiteNoiseMoments) {
  Rng rng(2);
  GpSampler s(KernelSpec::diagonal_white(1.0), line({0, 1, 2, 3}), GpSampler::Method::kCholesky);
  const Matrix d = s.sample_batch(100000, 1.0, rng);
  for (int i = 0; i < 4; ++i) {
    const double var = (d.row(i).array() - d.row(i).mean()).square().sum() / (d.cols() - 1);
    EXPECT_NEAR(var, 1.0, 0.05);
  }
  EXPECT_NEAR((d.row(0).array() * d.row(1).array()).mean(), 0.0, 0.02);
}

TEST(SampleGp, MaternCorrelation) {
  Rng rng(3);
  GpSampler s(KernelSpec::matern_half(1.0, 1.0), line({0, 1}), GpSampler::Method::kCholesky);
  EXPECT_NEAR(correlation(s.sample_batch(100000, 1.0, rng), 0, 1), std::exp(-1.0), 0.02);
}

TEST(SampleGp, EmpiricalCovarianceConvergesToScaledKernel) {
  Rng rng(4);
  const auto spec = KernelSpec::matern_half(1.5, 0.5);
  const Matrix pts = ActionSpace::cube_grid(2, 3).points();
  GpSampler s(spec, pts, GpSampler::Method::kCholesky);
  const double scale = 2.0;
  const Matrix d = s.sample_batch(100000, scale, rng);
  const Matrix cov = d * d.transpose() / static_cast<double>(d.cols());
  const Matrix target = scale * scale * kernel_matrix(spec, pts);
  EXPECT_LE((cov - target).norm(), 0.05 * target.norm());
}

TEST(SampleGpOu, SinglePointAndCorrelation) {
  Rng rng(5);
  GpSampler one(KernelSpec::matern_half(4.0, 1.0), line({0.2}), GpSampler::Method::kMarkov1d);
  const Matrix d1 = one.sample_batch(100000, 1.0, rng);
  EXPECT_NEAR(d1.row(0).array().square().mean(), 4.0, 0.1);
  GpSampler two(KernelSpec::matern_half(1.0, 0.5), line({0.1, 0.4}), GpSampler::Method::kMarkov1d);
  EXPECT_NEAR(correlation(two.sample_batch(100000, 1.0, rng), 0, 1), std::exp(-0.3 / 0.5), 0.02);
  EXPECT_THROW(sample_gp_ou_1d(KernelSpec::matern_half(1.0, 1.0), line({0.5, 0.1}), 1.0, rng), InvalidInput);
}

TEST(SampleGpOu, MatchesCholeskyInDistribution) {
  const auto spec = KernelSpec::matern_half(1.0, 0.3);
  const Matrix grid = ActionSpace::cube_grid(1, 16).points();
  GpSampler ou(spec, grid, GpSampler::Method::kMarkov1d);
  GpSampler dense(spec, grid, GpSampler::Method::kCholesky);
  Rng ra(6), rb(7);
  const Matrix a = ou.sample_batch(20000, 1.0, ra);
  const Matrix b = dense.sample_batch(20000, 1.0, rb);
  std::vector<double> sa, sb, pa, pb;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    sa.push_back(a.col(c).maxCoeff());
    sb.push_back(b.col(c).maxCoeff());
    pa.push_back(a(5, c));
    pb.push_back(b(5, c));
  }
  EXPECT_GT(ks_two_sample(sa, sb).p_value, 0.01);
  EXPECT_GT(ks_two_sample(pa, pb).p_value, 0.01);
}

TEST(Sampler, AutoSelection) {
  EXPECT_EQ(GpSampler(KernelSpec::diagonal_white(1.0), ActionSpace::finite(3)).method(), GpSampler::Method::kDiagonal);
  EXPECT_EQ(GpSampler(KernelSpec::matern_half(1.0, 1.0), ActionSpace::cube_grid(1, 8)).method(),
            GpSampler::Method::kMarkov1d);
  EXPECT_EQ(GpSampler(KernelSpec::matern_half(1.0, 1.0), ActionSpace::cube_grid(2, 4)).method(),
            GpSampler::Method::kCholesky);
  EXPECT_THROW(GpSampler(KernelSpec::matern_half(1.0, 1.0), ActionSpace::cube_grid(2, 65)), InvalidInput);
}

TEST(ExpectedSup, Examples) {
  Rng rng(8);
  const auto one = expected_sup_mc(KernelSpec::matern_half(1.0, 1.0), line({0.5}), 20000, rng);
  EXPECT_LE(std::abs(one.value), 3.0 * one.std_error);
  const auto ten = expected_sup_mc(KernelSpec::diagonal_white(1.0), ActionSpace::finite(10).points(), 20000, rng);
  EXPECT_LE(ten.value, 2.145966026289347);
  const auto dense = expected_sup_mc(KernelSpec::matern_half(1.0, 1.0), ActionSpace::cube_grid(1, 512).points(), 5000, rng);
  EXPECT_LE(dense.value, 13.33);
  EXPECT_THROW(expected_sup_mc(KernelSpec::diagonal_white(1.0), line({0}), 1, rng), InvalidInput);
}

TEST(ClosedForms, DudleyAndGaussianMax) {
  EXPECT_NEAR(dudley_bound(KernelSpec::matern_half(1.0, 1.0), 1), 13.320873778523163, 1e-12);
  EXPECT_NEAR(dudley_bound(KernelSpec::matern_half(4.0, 1.0), 1), 2.0 * 13.320873778523163, 1e-12);
  EXPECT_NEAR(dudley_bound(KernelSpec::matern_half(1.0, 1.0), 4), 33.54070636698256, 1e-11);
  EXPECT_EQ(gaussian_max_bound(1.0, 1), 0.0);
  EXPECT_NEAR(gaussian_max_bound(std::sqrt(2.0), 10), 3.034854258770293, 1e-12);
}

TEST(ClosedForms, ModulusBound) {
  const auto spec = KernelSpec::matern_half(1.0, 1.0);
  EXPECT_EQ(modulus_bound(spec, 1, 0.0), 0.0);
  EXPECT_NEAR(modulus_bound(spec, 1, 1.0 / 8), 32.0 * std::sqrt(1.0 / 16 * std::log(160.0)), 1e-12);
  EXPECT_NEAR(modulus_bound(spec, 1, 1.0 / 8), 18.0225, 1e-3);
  EXPECT_NEAR(modulus_bound(spec, 1, 1.0 / 16), 13.5863, 1e-3);
}

TEST(Modulus, MonotoneAndBounded) {
  const auto spec = KernelSpec::matern_half(1.0, 1.0);
  GpSampler s(spec, ActionSpace::cube_grid(1, 64));
  Rng rng(9);
  EXPECT_EQ(modulus_of_continuity_mc(s, 0.0, 100, rng).value, 0.0);
  Rng r1(10), r2(10);  // shared draws make the comparison pathwise
  const auto wide = modulus_of_continuity_mc(s, 1.0 / 8, 10000, r1);
  const auto narrow = modulus_of_continuity_mc(s, 1.0 / 16, 10000, r2);
  EXPECT_LT(narrow.value, wide.value);
  EXPECT_LE(wide.value, modulus_bound(spec, 1, 1.0 / 8));
  EXPECT_LE(narrow.value, modulus_bound(spec, 1, 1.0 / 16));
}
