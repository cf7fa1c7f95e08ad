#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "sica/errors.hpp"
#include "sica/isonull.hpp"
#include "sica/random.hpp"

namespace sica {
namespace {

ComponentSet white_noise(Eigen::Index k, Eigen::Index n, Seed seed) {
  return ComponentSet(test::whiten_rows(test::gaussian_matrix(k, n, seed)), true);
}

TEST(IsoNull, GaussianTau) {
  const NullModel g = NullModel::gaussian();
  EXPECT_NEAR(threshold_for_pvalue(g, 0.05), 1.95996, 1e-5);
  EXPECT_NEAR(threshold_for_pvalue(g, 0.01), 2.57583, 1e-5);
  EXPECT_NEAR(g.survival(1.959963984540054), 0.05, 1e-12);
  EXPECT_DOUBLE_EQ(g.survival(0.0), 1.0);
}

TEST(IsoNull, EmpiricalSurvivalOfWhiteNoise) {
  const NullModel null = sample_null(white_noise(10, 5000, 1), 500, 2);
  EXPECT_EQ(null.samples.size(), 500u * 5000u);
  EXPECT_GE(null.survival(1.96), 0.045);
  EXPECT_LE(null.survival(1.96), 0.055);
  EXPECT_FALSE(null.unstable_tail);
}

TEST(IsoNull, EmpiricalTauMatchesGaussianTau) {
  // 10 x 10000 maps and 100 directions pool 10^6 samples.
  const NullModel null = sample_null(white_noise(10, 10000, 3), 100, 4);
  for (double alpha : {0.05, 0.01}) {
    EXPECT_NEAR(threshold_for_pvalue(null, alpha), threshold_for_pvalue(NullModel::gaussian(), alpha), 0.03);
  }
}

TEST(IsoNull, ProjectionOntoAxisRecoversRow) {
  const ComponentSet b = white_noise(3, 200, 5);
  Matrix e1 = Matrix::Zero(1, 3);
  e1(0, 0) = 1.0;
  const NullModel null = project_null(b, e1);
  std::vector<double> expected(200);
  for (Eigen::Index v = 0; v < 200; ++v) expected[std::size_t(v)] = std::abs(b.patterns()(0, v));
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(null.samples, expected);
}

TEST(IsoNull, OutlierComponentWidensEmpiricalTail) {
  // One component with a few huge values: its energy spreads over every
  // direction, so the empirical tau exceeds the Gaussian one.
  Matrix m = test::gaussian_matrix(5, 4000, 6);
  for (Eigen::Index v = 0; v < 40; ++v) m(0, v) = 25.0;
  const ComponentSet b(test::whiten_rows(m), true);
  const NullModel null = sample_null(b, 200, 7);
  EXPECT_GT(threshold_for_pvalue(null, 0.01), threshold_for_pvalue(NullModel::gaussian(), 0.01));
}

TEST(IsoNull, ArgumentErrors) {
  const ComponentSet b = white_noise(4, 500, 8);
  const NullModel null = sample_null(b, 60, 9);
  EXPECT_THROW(threshold_for_pvalue(null, 0.0), InvalidArgument);
  EXPECT_THROW(threshold_for_pvalue(null, 0.6), InvalidArgument);
  // 60 * 500 = 30000 samples support alpha down to 10 / 30000.
  EXPECT_NO_THROW(threshold_for_pvalue(null, 4e-4));
  EXPECT_THROW(threshold_for_pvalue(null, 3e-4), UnstableTailError);
  EXPECT_THROW(sample_null(b, 49, 1), UnstableTailError);
  const NullModel few = sample_null(b, 49, 1, DirectionPolicy::allow_few);
  EXPECT_TRUE(few.unstable_tail);
  EXPECT_THROW(sample_null(b, 0, 1, DirectionPolicy::allow_few), InvalidArgument);
  const ComponentSet scaled(2.0 * test::gaussian_matrix(4, 500, 1), false);
  EXPECT_THROW(sample_null(scaled, 100, 1), InvalidArgument);
  EXPECT_THROW(apply_threshold(b, -1.0, 0.05), InvalidArgument);
}

TEST(IsoNull, ApplyThresholdIsStrict) {
  Matrix p(1, 4);
  p << -3.0, 2.0, -1.0, 0.5;
  const ComponentSet b(p, false);
  const ThresholdResult r = apply_threshold(b, 2.0, 0.05);
  EXPECT_TRUE(r.supports(0, 0));
  EXPECT_FALSE(r.supports(0, 1));
  EXPECT_FALSE(r.supports(0, 2));
  EXPECT_EQ(r.n_selected(), 1u);
}

TEST(IsoNull, GaussianNullCalibratedOnWhiteNoise) {
  // Selection fraction over 20 independent 20 x 8000 noise sets, against
  // alpha within three binomial standard errors of the pooled count.
  const double alpha = 0.05;
  double selected = 0.0;
  double total = 0.0;
  for (Seed seed = 0; seed < 20; ++seed) {
    const ComponentSet b = white_noise(20, 8000, 1000 + seed);
    const ThresholdResult r = threshold_components(b, NullModel::gaussian(), alpha);
    selected += double(r.n_selected());
    total += double(b.patterns().size());
  }
  const double se = std::sqrt(alpha * (1 - alpha) / total);
  EXPECT_NEAR(selected / total, alpha, 3 * se);
}

TEST(IsoNull, EmpiricalNullIsRotationInvariant) {
  const ComponentSet b = white_noise(6, 3000, 10);
  const Matrix q = random_orthogonal(6, 11);
  const ComponentSet rotated(q * b.patterns(), true);
  const double t1 = threshold_for_pvalue(sample_null(b, 400, 12), 0.01);
  const double t2 = threshold_for_pvalue(sample_null(rotated, 400, 12), 0.01);
  EXPECT_NEAR(t1, t2, 0.02 * t1);
}

TEST(IsoNull, ThresholdMonotoneInAlpha) {
  const NullModel null = sample_null(white_noise(5, 4000, 13), 100, 14);
  double prev = INFINITY;
  for (double alpha : {1e-3, 5e-3, 1e-2, 5e-2, 0.1, 0.3, 0.5}) {
    const double t = threshold_for_pvalue(null, alpha);
    EXPECT_LE(t, prev);
    prev = t;
  }
}

TEST(IsoNull, ResultRecordsProvenance) {
  const ComponentSet b = white_noise(4, 1000, 15);
  const NullModel null = sample_null(b, 80, 16);
  const ThresholdResult r = threshold_components(b, null, 0.05);
  EXPECT_EQ(r.method, NullKind::empirical);
  EXPECT_EQ(r.n_directions, 80u);
  EXPECT_EQ(r.seed, 16u);
  const NullModel again = sample_null(b, 80, 16);
  EXPECT_EQ(again.samples, null.samples);
}

}  // namespace
}  // namespace sica
