#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sica/mixbase.hpp"
#include "sica/pipeline.hpp"
#include "sica/simgen.hpp"
#include "sica/version.hpp"

namespace sica {

inline constexpr const char* kCsvVersionLine = "# sica-version " SICA_VERSION_STRING;

// ---------------------------------------------------------------------------
// Component matching

/// permutation[i] is the true component matched to estimated row i.
struct MatchResult {
  std::vector<std::size_t> permutation;
  std::vector<int> signs;
  std::vector<double> correlations;  // matched |Pearson r|
};

/// Pearson correlation; 0 when either side has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

/// Assignment maximizing the total |correlation| (exact Hungarian).
MatchResult match_components(const Matrix& estimated, const Matrix& truth);
MatchResult match_components(const ComponentSet& estimated, const Matrix& truth);

// ---------------------------------------------------------------------------
// Confusion counts

struct Confusion {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

  double fpr() const { return fp + tn == 0 ? 0.0 : double(fp) / double(fp + tn); }
  double tpr() const { return tp + fn == 0 ? 1.0 : double(tp) / double(tp + fn); }

  Confusion& operator+=(const Confusion& other);
};

/// Voxel-wise counts pooled over rows; rows must already be aligned.
Confusion confusion(const Mask& estimated, const Mask& truth);

/// Pools est row i against truth row match.permutation[i].
Confusion confusion(const Mask& estimated, const Mask& truth, const MatchResult& match);

// ---------------------------------------------------------------------------
// ROC

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double parameter = 0.0;  // alpha or mixture ratio
};

struct RocCurve {
  std::vector<RocPoint> points;    // sorted by fpr, then tpr
  std::vector<RocPoint> envelope;  // (0,0) .. (1,1), tpr nondecreasing
  double auc = 0.0;
};

/// Sorts the operating points, builds the monotone envelope anchored at
/// (0,0) and (1,1) and integrates it with the trapezoid rule.
RocCurve make_roc(std::vector<RocPoint> points);

/// Full ROC of a score against binary labels, every distinct score a cut.
RocCurve roc_from_scores(std::span<const double> scores, std::span<const bool> labels);

enum class ThresholdMethod { isonull_gaussian, isonull_empirical, mixture };

std::string to_string(ThresholdMethod method);
ThresholdMethod threshold_method_from_string(const std::string& name);

struct RocOptions {
  std::size_t n_directions = kDefaultDirections;
  Seed seed = 0;
  MixtureOptions mixture;
};

/// Log-spaced alphas in [1e-4, 0.5].
std::vector<double> default_alpha_grid(std::size_t n = 25);

/// `parameters` are alphas for the isonull methods and posterior ratios for
/// the mixture method. Thresholded supports are matched to the truth sources
/// before scoring.
RocCurve roc_sweep(const ComponentSet& b_hat, const Matrix& truth_sources, const Mask& truth_supports,
                   std::span<const double> parameters, ThresholdMethod method,
                   const RocOptions& options = {});
RocCurve roc_sweep(const ComponentSet& b_hat, const SimTruth& truth, std::span<const double> parameters,
                   ThresholdMethod method, const RocOptions& options = {});

// ---------------------------------------------------------------------------
// Simulation runs

struct SimulationRun {
  SimTruth truth;
  Decomposition decomposition;
  MatchResult match;
};

/// simulate -> fit_pca -> fastica -> match against the truth.
SimulationRun run_simulation(const SimConfig& config, const PipelineOptions& options);

/// Seed of replicate `index` for a base configuration.
Seed replicate_seed(Seed base, std::size_t index);

struct FprTable {
  std::vector<std::string> conditions;
  std::vector<double> alphas;
  Matrix fpr;  // conditions x alphas, mean over seeds
  std::size_t n_seeds = 0;
};

std::string condition_label(const SimConfig& config);

FprTable fpr_table(std::span<const SimConfig> configs, std::span<const double> alphas,
                   std::size_t n_seeds, const PipelineOptions& options = {});

void write_fpr_table_csv(const FprTable& table, std::ostream& out);

struct RocRecord {
  std::string condition;
  std::string method;
  Seed seed = 0;
  RocCurve curve;
};

void write_roc_csv(std::span<const RocRecord> records, std::ostream& out);

struct RocStudyOptions {
  std::vector<ThresholdMethod> methods{ThresholdMethod::isonull_gaussian, ThresholdMethod::mixture};
  std::vector<double> alphas = default_alpha_grid();
  std::vector<double> ratios = default_ratio_grid();
  std::size_t n_seeds = 10;
  PipelineOptions pipeline;
  MixtureOptions mixture;
};

/// One curve per (condition, method, replicate), ordered by condition, then
/// method, then replicate regardless of execution order.
std::vector<RocRecord> roc_study(std::span<const SimConfig> configs, const RocStudyOptions& options);

/// Mean AUC over replicates per (condition, method), same ordering as the
/// records with the replicate dimension collapsed.
std::vector<double> mean_auc(std::span<const RocRecord> records, std::size_t n_seeds);

// ---------------------------------------------------------------------------
// Downsampling consistency

struct ConsistencyOptions {
  std::size_t k = 3;
  std::size_t n_components = 9;
  IcaOptions ica;
  double alpha = 1e-2;
  NullKind null_kind = NullKind::gaussian;
  std::size_t n_directions = kDefaultDirections;
  Seed seed = 0;
};

struct ConsistencyRun {
  std::size_t offset = 0;  // first frame of the interleaved series
  std::size_t n_time = 0;
  Confusion counts;
  double mean_correlation = 0.0;

  double fpr() const { return counts.fpr(); }
  double tpr() const { return counts.tpr(); }
};

struct ConsistencyReport {
  std::size_t reference_selected = 0;  // voxels selected on the full data
  std::vector<ConsistencyRun> runs;
  // Observed FPR against an imperfect pseudo ground truth may be corrected by
  // this factor; reported only, never applied.
  double pseudo_truth_correction = 0.5;
};

/// Frames offset, offset + k, offset + 2k, ...
Dataset subsample_frames(const Dataset& y, std::size_t k, std::size_t offset);

ConsistencyReport downsample_consistency(const Dataset& y, const ConsistencyOptions& options);

void write_consistency_csv(const ConsistencyReport& report, std::ostream& out);

/// Temporal extension of a simulation: y = W C + noise, with W smooth random
/// time courses (Gaussian-smoothed white noise, `smoothness` frames FWHM).
Dataset synthetic_time_series(const SimTruth& truth, std::size_t n_time, double observation_noise,
                              Seed seed, double smoothness = 4.0);

/// The six simulation conditions of the FPR table: sigma in {0.15, 0.20,
/// 0.30} crossed with Gaussian and kurtosis-4 super-Gaussian noise.
std::vector<SimConfig> table_conditions(Seed base_seed);

}  // namespace sica
