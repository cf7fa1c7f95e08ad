#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "fixtures.hpp"
#include "sica/errors.hpp"
#include "sica/eval.hpp"
#include "sica/random.hpp"
#include "sica/stats.hpp"

namespace sica {
namespace {

TEST(Matching, RecoversPermutationAndSigns) {
  const Matrix truth = test::gaussian_matrix(4, 300, 1);
  Matrix est(4, 300);
  est.row(0) = -truth.row(2);
  est.row(1) = truth.row(0);
  est.row(2) = truth.row(3) + 0.1 * test::gaussian_matrix(1, 300, 2);
  est.row(3) = truth.row(1);
  const MatchResult m = match_components(est, truth);
  EXPECT_EQ(m.permutation, (std::vector<std::size_t>{2, 0, 3, 1}));
  EXPECT_EQ(m.signs, (std::vector<int>{-1, 1, 1, 1}));
  EXPECT_NEAR(m.correlations[0], 1.0, 1e-12);
  EXPECT_LT(m.correlations[2], 1.0);
  EXPECT_THROW(match_components(est.topRows(3), truth), InvalidArgument);
}

TEST(Matching, MaximizesTotalCorrelation) {
  // Greedy would take the 0.9 pair first; the optimum avoids it.
  Matrix truth = test::whiten_rows(test::gaussian_matrix(2, 2000, 3));
  Matrix est(2, 2000);
  est.row(0) = 0.9 * truth.row(0) + 0.436 * truth.row(1);
  est.row(1) = 0.8 * truth.row(0) + 0.1 * truth.row(1);
  const MatchResult m = match_components(est, truth);
  EXPECT_EQ(m.permutation, (std::vector<std::size_t>{1, 0}));
}

TEST(Matching, IdenticalSourcesMatchThemselves) {
  const Matrix truth = test::gaussian_matrix(6, 200, 4);
  const MatchResult m = match_components(truth, truth);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(m.permutation[i], i);
}

TEST(Matching, SurvivesSmallPerturbation) {
  const Matrix truth = test::gaussian_matrix(5, 1000, 20);
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
  Matrix est(5, 1000);
  for (Eigen::Index i = 0; i < 5; ++i) est.row(i) = truth.row(Eigen::Index(perm[std::size_t(i)]));
  est += 0.1 * test::gaussian_matrix(5, 1000, 21);
  const MatchResult m = match_components(est, truth);
  EXPECT_EQ(m.permutation, perm);
  for (double r : m.correlations) EXPECT_GT(r, 0.95);
}

TEST(Matching, DuplicateTruthAgreesWithBruteForce) {
  for (Seed seed = 0; seed < 20; ++seed) {
    Matrix truth = test::gaussian_matrix(5, 100, 30 + seed);
    truth.row(3) = truth.row(1);
    const Matrix est = test::gaussian_matrix(5, 100, 60 + seed) + truth;
    const MatchResult m = match_components(est, truth);
    std::vector<std::size_t> sorted = m.permutation;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, (std::vector<std::size_t>{0, 1, 2, 3, 4}));

    std::vector<std::size_t> p{0, 1, 2, 3, 4};
    double best = 0.0;
    do {
      double total = 0.0;
      for (Eigen::Index i = 0; i < 5; ++i) {
        total += std::abs(pearson(stats::row_span(est, i), stats::row_span(truth, Eigen::Index(p[std::size_t(i)]))));
      }
      best = std::max(best, total);
    } while (std::next_permutation(p.begin(), p.end()));
    const double got = std::accumulate(m.correlations.begin(), m.correlations.end(), 0.0);
    EXPECT_NEAR(got, best, 1e-12);
  }
}

TEST(Confusion, IdentityAndComplement) {
  Rng rng(22);
  std::bernoulli_distribution p(0.3);
  Mask truth(3, 400);
  for (Eigen::Index i = 0; i < truth.size(); ++i) truth.data()[i] = p(rng);
  const Confusion same = confusion(truth, truth);
  EXPECT_EQ(same.fp + same.fn, 0u);
  const Mask flipped = truth.array() == false;
  const Confusion inverse = confusion(flipped, truth);
  EXPECT_EQ(inverse.tp + inverse.tn, 0u);
}

TEST(Confusion, IndependentMaskRates) {
  // est at density d, truth at density s: both rates estimate d.
  Rng rng(23);
  std::bernoulli_distribution est_p(0.2), truth_p(0.05);
  Mask est(10, 20000), truth(10, 20000);
  for (Eigen::Index i = 0; i < est.size(); ++i) {
    est.data()[i] = est_p(rng);
    truth.data()[i] = truth_p(rng);
  }
  const Confusion c = confusion(est, truth);
  const double negatives = double(c.fp + c.tn), positives = double(c.tp + c.fn);
  EXPECT_NEAR(c.fpr(), 0.2, 3 * std::sqrt(0.2 * 0.8 / negatives));
  EXPECT_NEAR(c.tpr(), 0.2, 3 * std::sqrt(0.2 * 0.8 / positives));
}

TEST(Confusion, CountsByHand) {
  Mask est(1, 6), truth(1, 6);
  est << true, true, false, false, true, false;
  truth << true, false, true, false, false, false;
  const Confusion c = confusion(est, truth);
  EXPECT_EQ(c.tp, 1u);
  EXPECT_EQ(c.fp, 2u);
  EXPECT_EQ(c.fn, 1u);
  EXPECT_EQ(c.tn, 2u);
  EXPECT_DOUBLE_EQ(c.fpr(), 0.5);
  EXPECT_DOUBLE_EQ(c.tpr(), 0.5);
  EXPECT_DOUBLE_EQ(Confusion{}.tpr(), 1.0);
  EXPECT_DOUBLE_EQ(Confusion{}.fpr(), 0.0);
}

TEST(Confusion, UsesMatching) {
  Mask est(2, 3), truth(2, 3);
  est << true, false, false, false, true, true;
  truth << false, true, true, true, false, false;
  MatchResult swap;
  swap.permutation = {1, 0};
  const Confusion c = confusion(est, truth, swap);
  EXPECT_EQ(c.tp, 3u);
  EXPECT_EQ(c.fp + c.fn, 0u);
}

TEST(Confusion, RandomMaskDensity) {
  Rng rng(5);
  std::bernoulli_distribution p(0.1);
  Mask est(10, 5000), truth = Mask::Constant(10, 5000, false);
  for (Eigen::Index i = 0; i < est.size(); ++i) est.data()[i] = p(rng);
  const Confusion c = confusion(est, truth);
  const double se = std::sqrt(0.1 * 0.9 / 50000.0);
  EXPECT_NEAR(c.fpr(), 0.1, 3 * se);
}

TEST(Roc, EnvelopeAndArea) {
  const RocCurve c = make_roc({{0.5, 0.8, 0.1}, {0.1, 0.6, 0.01}, {0.3, 0.5, 0.05}});
  ASSERT_EQ(c.points.size(), 3u);
  EXPECT_DOUBLE_EQ(c.points[0].fpr, 0.1);
  EXPECT_DOUBLE_EQ(c.envelope.front().fpr, 0.0);
  EXPECT_DOUBLE_EQ(c.envelope.back().tpr, 1.0);
  for (std::size_t i = 1; i < c.envelope.size(); ++i) EXPECT_GE(c.envelope[i].tpr, c.envelope[i - 1].tpr);
  // (0,0) (0.1,0.6) (0.3,0.6) (0.5,0.8) (1,1)
  const double expected = 0.1 * 0.3 + 0.2 * 0.6 + 0.2 * 0.7 + 0.5 * 0.9;
  EXPECT_NEAR(c.auc, expected, 1e-12);
  EXPECT_NEAR(make_roc({}).auc, 0.5, 1e-12);
  EXPECT_NEAR(make_roc({{0.0, 1.0, 0.0}}).auc, 1.0, 1e-12);
}

TEST(Roc, RandomScoresGiveChance) {
  double total = 0.0;
  for (Seed seed = 0; seed < 20; ++seed) {
    const Matrix s = test::gaussian_matrix(1, 2000, 100 + seed);
    std::vector<bool> labels_v(2000);
    Rng rng(seed);
    std::bernoulli_distribution p(0.3);
    for (auto&& l : labels_v) l = p(rng);
    std::unique_ptr<bool[]> labels(new bool[2000]);
    for (std::size_t i = 0; i < 2000; ++i) labels[i] = labels_v[i];
    total += roc_from_scores({s.data(), 2000}, {labels.get(), 2000}).auc;
  }
  EXPECT_NEAR(total / 20.0, 0.5, 0.05);
}

TEST(Roc, NoiselessUnmixedMapsThresholdPerfectly) {
  // With sigma = 0 the true unmixed maps are the sharp rectangles; every
  // alpha up to 0.05 recovers the supports exactly.
  SimConfig c;
  c.sigma = 0.0;
  c.smooth_sources = false;
  c.seed = 6;
  const SimTruth t = simulate(c);
  Matrix b = t.unmixed;
  for (Eigen::Index i = 0; i < b.rows(); ++i) stats::standardize(stats::row_span(b, i));
  const ComponentSet unmixed(b, false);
  const auto alphas = default_alpha_grid(10);
  std::vector<double> usable;
  for (double a : alphas) {
    if (a <= 0.05) usable.push_back(a);
  }
  const RocCurve roc = roc_sweep(unmixed, t, usable, ThresholdMethod::isonull_gaussian);
  EXPECT_NEAR(roc.auc, 1.0, 1e-12);
  for (const RocPoint& p : roc.points) {
    EXPECT_EQ(p.fpr, 0.0);
    EXPECT_EQ(p.tpr, 1.0);
  }
}

TEST(Roc, NoiselessEstimatedMapsStayBelowAlpha) {
  // Estimated maps are not exact even without noise: overlapping rectangles
  // are correlated and whitening forces them apart. Selection stays
  // conservative and nearly perfect.
  SimConfig c;
  c.sigma = 0.0;
  c.smooth_sources = false;
  c.seed = 6;
  PipelineOptions opts;
  opts.ica.seed = 6;
  const SimulationRun run = run_simulation(c, opts);
  const auto alphas = default_alpha_grid(10);
  const RocCurve roc = roc_sweep(run.decomposition.ica.sources, run.truth, alphas, ThresholdMethod::isonull_gaussian);
  EXPECT_GT(roc.auc, 0.999);
  for (const RocPoint& p : roc.points) EXPECT_LE(p.fpr, p.parameter);
}

TEST(Roc, MethodNames) {
  for (auto m : {ThresholdMethod::isonull_gaussian, ThresholdMethod::isonull_empirical, ThresholdMethod::mixture}) {
    EXPECT_EQ(threshold_method_from_string(to_string(m)), m);
  }
  EXPECT_THROW(threshold_method_from_string("fdr"), InvalidArgument);
  const auto grid = default_alpha_grid();
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
  EXPECT_NEAR(grid.front(), 1e-4, 1e-15);
  EXPECT_NEAR(grid.back(), 0.5, 1e-12);
}

TEST(FprTable, ReproducibleAndShaped) {
  auto configs = table_conditions(1);
  ASSERT_EQ(configs.size(), 6u);
  EXPECT_EQ(condition_label(configs[0]), "gaussian_sigma0.15");
  EXPECT_EQ(condition_label(configs[3]), "super-gaussian_sigma0.2");
  configs.resize(2);
  const std::vector<double> alphas{0.05, 0.01};
  const FprTable a = fpr_table(configs, alphas, 2);
  const FprTable b = fpr_table(configs, alphas, 2);
  EXPECT_TRUE(test::bitwise_equal(a.fpr, b.fpr));
  EXPECT_EQ(a.fpr.rows(), 2);
  EXPECT_EQ(a.fpr.cols(), 2);
  for (Eigen::Index c = 0; c < 2; ++c) EXPECT_GE(a.fpr(c, 0), a.fpr(c, 1));

  std::ostringstream csv;
  write_fpr_table_csv(a, csv);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, kCsvVersionLine);
  std::getline(lines, line);
  EXPECT_EQ(line.front(), '#');
  std::getline(lines, line);
  EXPECT_EQ(line, "condition,0.05,0.01");
  EXPECT_THROW(fpr_table(configs, std::vector<double>{0.7}, 1), InvalidArgument);
}

TEST(FprTable, NoiselessFprBelowAlpha) {
  SimConfig c;
  c.sigma = 0.0;
  c.smooth_sources = false;
  const std::vector<SimConfig> configs{c};
  const std::vector<double> alphas{0.05, 0.01};
  const FprTable t = fpr_table(configs, alphas, 2);
  EXPECT_LE(t.fpr(0, 0), 0.05);
  EXPECT_LE(t.fpr(0, 1), 0.01);
}

TEST(RocStudy, OrderingAndCsv) {
  std::vector<SimConfig> configs = table_conditions(2);
  configs.resize(2);
  RocStudyOptions opts;
  opts.n_seeds = 2;
  opts.alphas = default_alpha_grid(6);
  opts.ratios = default_ratio_grid(5);
  const auto records = roc_study(configs, opts);
  ASSERT_EQ(records.size(), 8u);
  EXPECT_EQ(records[0].method, "isonull-gaussian");
  EXPECT_EQ(records[2].method, "mixture");
  EXPECT_EQ(records[4].condition, "super-gaussian_sigma0.15");
  EXPECT_EQ(records[0].seed, records[2].seed);
  EXPECT_NE(records[0].seed, records[1].seed);
  const auto auc = mean_auc(records, 2);
  ASSERT_EQ(auc.size(), 4u);
  EXPECT_NEAR(auc[0], 0.5 * (records[0].curve.auc + records[1].curve.auc), 1e-15);

  std::ostringstream csv;
  write_roc_csv(records, csv);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, kCsvVersionLine);
  std::getline(lines, line);
  EXPECT_EQ(line, "condition,fpr,tpr,alpha,method,seed,auc");
}

TEST(Consistency, RepeatedFramesAreSelfConsistent) {
  // Every frame repeated three times: each interleaved subsample is the
  // original series, so every run reproduces the reference exactly.
  SimConfig c;
  c.seed = 7;
  const SimTruth t = simulate(c);
  const Dataset base = synthetic_time_series(t, 60, 0.05, 8);
  Matrix rep(180, base.data().cols());
  for (Eigen::Index i = 0; i < 60; ++i) rep.middleRows(3 * i, 3).rowwise() = base.data().row(i);
  ConsistencyOptions opts;
  opts.k = 3;
  opts.ica.seed = 9;
  const ConsistencyReport r = downsample_consistency(Dataset(rep, c.grid), opts);
  ASSERT_EQ(r.runs.size(), 3u);
  for (const ConsistencyRun& run : r.runs) {
    EXPECT_EQ(run.n_time, 60u);
    EXPECT_EQ(run.counts.fp, 0u);
    EXPECT_EQ(run.counts.fn, 0u);
    EXPECT_NEAR(run.mean_correlation, 1.0, 1e-9);
  }
  EXPECT_GT(r.reference_selected, 0u);
}

TEST(Consistency, SingleFoldIsReference) {
  SimConfig c;
  c.seed = 10;
  const Dataset y = synthetic_time_series(simulate(c), 50, 0.05, 11);
  ConsistencyOptions opts;
  opts.k = 1;
  const ConsistencyReport r = downsample_consistency(y, opts);
  ASSERT_EQ(r.runs.size(), 1u);
  EXPECT_EQ(r.runs[0].counts.fp + r.runs[0].counts.fn, 0u);
}

TEST(Consistency, SyntheticSeriesAgreesAcrossFolds) {
  SimConfig c;
  c.seed = 12;
  const Dataset y = synthetic_time_series(simulate(c), 300, 0.1, 13);
  ConsistencyOptions opts;
  opts.k = 3;
  opts.ica.seed = 14;
  const ConsistencyReport r = downsample_consistency(y, opts);
  ASSERT_EQ(r.runs.size(), 3u);
  for (const ConsistencyRun& run : r.runs) {
    EXPECT_LE(run.fpr(), 0.02);
    EXPECT_GE(run.tpr(), 0.5);
  }
  std::ostringstream csv;
  write_consistency_csv(r, csv);
  const std::string text = csv.str();
  EXPECT_NE(text.find("offset,n_time,tp,fp,tn,fn,fpr,tpr,mean_correlation"), std::string::npos);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
}

TEST(Consistency, TooFewFrames) {
  const Dataset y(test::gaussian_matrix(8, 100, 1));
  ConsistencyOptions opts;
  opts.k = 3;
  EXPECT_THROW(downsample_consistency(y, opts), InvalidArgument);
  EXPECT_THROW(subsample_frames(y, 3, 3), InvalidArgument);
  EXPECT_EQ(subsample_frames(y, 3, 2).n_time(), 2u);
}

}  // namespace
}  // namespace sica
