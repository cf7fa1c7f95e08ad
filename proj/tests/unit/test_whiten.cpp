#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "sica/errors.hpp"
#include "sica/random.hpp"
#include "sica/whiten.hpp"

namespace sica {
namespace {

Matrix center_time_points(const Matrix& y) { return y.colwise() - y.rowwise().mean(); }

TEST(FitPca, SubspaceMatchesEigenOracle) {
  // Three patterns with well separated energies plus a little noise.
  const Matrix q = random_orthogonal(6, 1).leftCols(3);
  Matrix patterns = test::gaussian_matrix(3, 400, 2);
  Matrix y = q * Eigen::Vector3d(3.0, 2.0, 1.0).asDiagonal() * patterns + 0.01 * test::gaussian_matrix(6, 400, 3);
  const PcaFit fit = fit_pca(Dataset(y), 3);

  const Matrix c = center_time_points(y);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.transpose() * c);
  const Matrix top = eig.eigenvectors().rightCols(3).transpose();
  EXPECT_LT(test::max_principal_angle(fit.components.patterns(), top), 1e-8);
}

TEST(FitPca, PatternsAreWhitenedAndSignFixed) {
  const PcaFit fit = fit_pca(Dataset(test::gaussian_matrix(12, 900, 5)), 5);
  const RowStatistics s = row_statistics(fit.components.patterns());
  EXPECT_LT(s.mean.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((s.variance.array() - 1.0).abs().maxCoeff(), 1e-10);
  EXPECT_LT(s.max_abs_correlation, 1e-10);
  for (Eigen::Index i = 0; i < 5; ++i) {
    Eigen::Index arg = 0;
    fit.components.patterns().row(i).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(fit.components.patterns()(i, arg), 0.0);
  }
  for (Eigen::Index i = 1; i < fit.singular_values.size(); ++i) {
    EXPECT_GE(fit.singular_values(i - 1), fit.singular_values(i));
  }
}

TEST(FitPca, WhiteningAndLoadingsReconstruct) {
  const Matrix y = test::gaussian_matrix(8, 300, 6);
  const PcaFit full = fit_pca(Dataset(y), 8);
  const Matrix c = center_time_points(y);
  EXPECT_LT((full.loadings * full.components.patterns() - c).norm(), 1e-10 * c.norm());
  EXPECT_LT((full.whitening * c - full.components.patterns()).norm(), 1e-9);
  EXPECT_LT(full.residual_variance, 1e-20);
}

TEST(FitPca, ResidualVarianceOfNoiseTracksDroppedShare) {
  // For white noise each retained component carries roughly 1/n_time of the
  // variance, slightly more because the top singular values are picked.
  for (Seed seed = 0; seed < 20; ++seed) {
    const Matrix y = test::gaussian_matrix(20, 2000, 100 + seed);
    const Matrix c = center_time_points(y);
    const double total = c.squaredNorm() / double(c.size());
    const PcaFit fit = fit_pca(Dataset(y), 5);
    EXPECT_NEAR(fit.residual_variance, total * (1.0 - 5.0 / 20.0), 0.1 * total * 0.75) << "seed " << seed;
  }
}

TEST(FitPca, LowRankInputHasNoResidual) {
  const Matrix y = test::gaussian_matrix(10, 2, 8) * test::gaussian_matrix(2, 500, 9);
  const PcaFit fit = fit_pca(Dataset(y), 2);
  EXPECT_LT(fit.residual_variance, 1e-16);
}

TEST(FitPca, RankErrorsReportAchievableRank) {
  const Matrix low = test::gaussian_matrix(10, 2, 8) * test::gaussian_matrix(2, 500, 9);
  try {
    fit_pca(Dataset(low), 4);
    FAIL();
  } catch (const RankError& e) {
    EXPECT_LE(e.achievable_rank(), 3u);
    EXPECT_GE(e.achievable_rank(), 2u);
  }
  try {
    fit_pca(Dataset(test::gaussian_matrix(5, 40, 1)), 6);
    FAIL();
  } catch (const RankError& e) {
    EXPECT_EQ(e.achievable_rank(), 5u);
  }
  EXPECT_THROW(fit_pca(Dataset(test::gaussian_matrix(5, 40, 1)), 0), InvalidArgument);
}

TEST(FitPca, ConstantInputIsDegenerate) {
  Matrix y(3, 50);
  for (Eigen::Index t = 0; t < 3; ++t) y.row(t).setConstant(double(t));
  EXPECT_THROW(fit_pca(Dataset(y), 1), DegenerateDataError);
}

TEST(FitPca, IdempotentOnWhitenedPatterns) {
  const PcaFit first = fit_pca(Dataset(test::gaussian_matrix(7, 500, 12)), 4);
  const PcaFit second = fit_pca(Dataset(first.components.patterns()), 4);
  EXPECT_LT(test::max_principal_angle(first.components.patterns(), second.components.patterns()), 1e-8);
  const RowStatistics s = row_statistics(second.components.patterns());
  EXPECT_LT((s.variance.array() - 1.0).abs().maxCoeff(), 1e-10);
}

TEST(FitPca, ScaleEquivariant) {
  const Matrix y = test::gaussian_matrix(6, 300, 13);
  const PcaFit a = fit_pca(Dataset(y), 3);
  const PcaFit b = fit_pca(Dataset(7.5 * y), 3);
  EXPECT_LT((a.components.patterns() - b.components.patterns()).norm(), 1e-9);
  EXPECT_NEAR(b.singular_values(0), 7.5 * a.singular_values(0), 1e-9 * b.singular_values(0));
}

}  // namespace
}  // namespace sica
