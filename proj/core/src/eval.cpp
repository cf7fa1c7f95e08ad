#include "sica/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include "parallel.hpp"
#include "sica/errors.hpp"
#include "sica/hungarian.hpp"
#include "sica/random.hpp"
#include "sica/stats.hpp"

namespace sica {

namespace {

constexpr std::uint64_t kIcaStream = 17;
constexpr std::uint64_t kNullStream = 18;
constexpr std::uint64_t kReplicateStream = 0x5eed;

std::string format_double(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

}  // namespace

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw InvalidArgument("pearson: need equal-length samples of size >= 2");
  const double ma = stats::mean(a), mb = stats::mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

MatchResult match_components(const Matrix& estimated, const Matrix& truth) {
  if (estimated.rows() != truth.rows() || estimated.cols() != truth.cols()) {
    throw InvalidArgument("match_components: estimated is " + std::to_string(estimated.rows()) + "x" +
                          std::to_string(estimated.cols()) + " but truth is " + std::to_string(truth.rows()) + "x" +
                          std::to_string(truth.cols()));
  }
  const Eigen::Index k = estimated.rows();
  Matrix corr(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) corr(i, j) = pearson(stats::row_span(estimated, i), stats::row_span(truth, j));
  }
  const std::vector<std::size_t> assignment = solve_assignment(-corr.cwiseAbs());
  MatchResult result;
  result.permutation = assignment;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double r = corr(i, static_cast<Eigen::Index>(assignment[static_cast<std::size_t>(i)]));
    result.signs.push_back(r < 0.0 ? -1 : 1);
    result.correlations.push_back(std::abs(r));
  }
  return result;
}

MatchResult match_components(const ComponentSet& estimated, const Matrix& truth) {
  return match_components(estimated.patterns(), truth);
}

Confusion& Confusion::operator+=(const Confusion& other) {
  tp += other.tp;
  fp += other.fp;
  tn += other.tn;
  fn += other.fn;
  return *this;
}

namespace {

void count_row(const Mask& est, Eigen::Index er, const Mask& truth, Eigen::Index tr, Confusion& c) {
  for (Eigen::Index v = 0; v < est.cols(); ++v) {
    const bool e = est(er, v), t = truth(tr, v);
    if (e && t) ++c.tp;
    else if (e) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
}

}  // namespace

Confusion confusion(const Mask& estimated, const Mask& truth) {
  if (estimated.rows() != truth.rows() || estimated.cols() != truth.cols()) {
    throw InvalidArgument("confusion: support shapes differ");
  }
  Confusion c;
  for (Eigen::Index i = 0; i < estimated.rows(); ++i) count_row(estimated, i, truth, i, c);
  return c;
}

Confusion confusion(const Mask& estimated, const Mask& truth, const MatchResult& match) {
  if (estimated.rows() != truth.rows() || estimated.cols() != truth.cols() ||
      match.permutation.size() != static_cast<std::size_t>(estimated.rows())) {
    throw InvalidArgument("confusion: support shapes or matching size differ");
  }
  Confusion c;
  for (Eigen::Index i = 0; i < estimated.rows(); ++i) {
    count_row(estimated, i, truth, static_cast<Eigen::Index>(match.permutation[static_cast<std::size_t>(i)]), c);
  }
  return c;
}

RocCurve make_roc(std::vector<RocPoint> points) {
  std::sort(points.begin(), points.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.fpr != b.fpr ? a.fpr < b.fpr : a.tpr < b.tpr;
  });
  RocCurve curve;
  curve.points = points;

  std::vector<RocPoint> env;
  env.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  for (const RocPoint& p : points) {
    RocPoint q = p;
    q.tpr = std::max(q.tpr, env.back().tpr);
    if (q.fpr == env.back().fpr) {
      env.back() = q;
    } else {
      env.push_back(q);
    }
  }
  if (env.back().fpr < 1.0) {
    env.push_back({1.0, 1.0, 0.0});
  } else {
    env.back().tpr = 1.0;
  }

  double auc = 0.0;
  for (std::size_t i = 1; i < env.size(); ++i) {
    auc += (env[i].fpr - env[i - 1].fpr) * 0.5 * (env[i].tpr + env[i - 1].tpr);
  }
  curve.envelope = std::move(env);
  curve.auc = std::clamp(auc, 0.0, 1.0);
  return curve;
}

RocCurve roc_from_scores(std::span<const double> scores, std::span<const bool> labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("roc_from_scores: size mismatch");
  const auto positives = static_cast<double>(std::count(labels.begin(), labels.end(), true));
  const double negatives = double(labels.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) {
    throw InvalidArgument("roc_from_scores: need both positive and negative labels");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> points;
  double tp = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (labels[order[i]]) tp += 1.0;
    else fp += 1.0;
    const bool last_of_tie = i + 1 == order.size() || scores[order[i + 1]] != scores[order[i]];
    if (last_of_tie) points.push_back({fp / negatives, tp / positives, scores[order[i]]});
  }
  return make_roc(std::move(points));
}

std::string to_string(ThresholdMethod method) {
  switch (method) {
    case ThresholdMethod::isonull_gaussian:
      return "isonull-gaussian";
    case ThresholdMethod::isonull_empirical:
      return "isonull-empirical";
    default:
      return "mixture";
  }
}

ThresholdMethod threshold_method_from_string(const std::string& name) {
  if (name == "isonull-gaussian" || name == "gaussian") return ThresholdMethod::isonull_gaussian;
  if (name == "isonull-empirical" || name == "empirical") return ThresholdMethod::isonull_empirical;
  if (name == "mixture") return ThresholdMethod::mixture;
  throw InvalidArgument("unknown threshold method '" + name + "'");
}

std::vector<double> default_alpha_grid(std::size_t n) {
  if (n < 2) return {0.05};
  std::vector<double> grid(n);
  const double a = std::log(1e-4), b = std::log(0.5);
  for (std::size_t i = 0; i < n; ++i) grid[i] = std::exp(a + (b - a) * double(i) / double(n - 1));
  return grid;
}

RocCurve roc_sweep(const ComponentSet& b_hat, const Matrix& truth_sources, const Mask& truth_supports,
                   std::span<const double> parameters, ThresholdMethod method, const RocOptions& options) {
  if (!std::is_sorted(parameters.begin(), parameters.end())) {
    throw InvalidArgument("roc_sweep: parameters must be sorted");
  }
  const MatchResult match = match_components(b_hat, truth_sources);
  std::vector<RocPoint> points;
  points.reserve(parameters.size());

  if (method == ThresholdMethod::mixture) {
    std::vector<MixtureFit> fits;
    for (Eigen::Index i = 0; i < b_hat.patterns().rows(); ++i) {
      fits.push_back(fit_mixture(stats::row_span(b_hat.patterns(), i), options.mixture));
    }
    for (double ratio : parameters) {
      Mask selected(b_hat.patterns().rows(), b_hat.patterns().cols());
      for (Eigen::Index i = 0; i < selected.rows(); ++i) {
        const auto row = stats::row_span(b_hat.patterns(), i);
        for (Eigen::Index v = 0; v < selected.cols(); ++v) {
          selected(i, v) = fits[static_cast<std::size_t>(i)].activation_ratio(row[static_cast<std::size_t>(v)]) > ratio;
        }
      }
      const Confusion c = confusion(selected, truth_supports, match);
      points.push_back({c.fpr(), c.tpr(), ratio});
    }
    return make_roc(std::move(points));
  }

  const NullModel null = method == ThresholdMethod::isonull_gaussian
                             ? NullModel::gaussian()
                             : sample_null(b_hat, options.n_directions, options.seed);
  for (double alpha : parameters) {
    const ThresholdResult t = threshold_components(b_hat, null, alpha);
    const Confusion c = confusion(t.supports, truth_supports, match);
    points.push_back({c.fpr(), c.tpr(), alpha});
  }
  return make_roc(std::move(points));
}

RocCurve roc_sweep(const ComponentSet& b_hat, const SimTruth& truth, std::span<const double> parameters,
                   ThresholdMethod method, const RocOptions& options) {
  return roc_sweep(b_hat, truth.smoothed_sources, truth.supports, parameters, method, options);
}

Seed replicate_seed(Seed base, std::size_t index) { return derive_seed(base ^ kReplicateStream, index); }

SimulationRun run_simulation(const SimConfig& config, const PipelineOptions& options) {
  SimTruth truth = simulate(config);
  const std::size_t k = options.n_components == 0 ? config.n_sources : options.n_components;
  Dataset y(truth.observed.patterns(), config.grid);
  Decomposition dec = decompose(y, k, options.ica);
  MatchResult match = match_components(dec.ica.sources, truth.smoothed_sources);
  return SimulationRun{std::move(truth), std::move(dec), std::move(match)};
}

std::string condition_label(const SimConfig& config) {
  std::ostringstream s;
  s << (config.target_kurtosis || config.theta > 0.0 ? "super-gaussian" : "gaussian") << "_sigma"
    << std::setprecision(3) << config.sigma;
  return s.str();
}

FprTable fpr_table(std::span<const SimConfig> configs, std::span<const double> alphas, std::size_t n_seeds,
                   const PipelineOptions& options) {
  if (n_seeds == 0) throw InvalidArgument("fpr_table: n_seeds must be positive");
  for (double a : alphas) {
    if (!(a > 0.0 && a <= 0.5)) throw InvalidArgument("fpr_table: alpha " + format_double(a) + " outside (0, 0.5]");
  }
  const std::size_t n_cells = configs.size() * n_seeds;
  // fpr per (cell, alpha), filled independently by each cell.
  std::vector<std::vector<double>> cell_fpr(n_cells);
  detail::parallel_for(n_cells, [&](std::size_t cell) {
    const std::size_t ci = cell / n_seeds, si = cell % n_seeds;
    SimConfig cfg = configs[ci];
    cfg.seed = replicate_seed(configs[ci].seed, si);
    PipelineOptions opts = options;
    opts.ica.seed = derive_seed(cfg.seed, kIcaStream);
    opts.null_seed = derive_seed(cfg.seed, kNullStream);
    const SimulationRun run = run_simulation(cfg, opts);
    const NullModel null = build_null(run.decomposition.ica.sources, opts);
    std::vector<double> out;
    for (double alpha : alphas) {
      const ThresholdResult t = threshold_components(run.decomposition.ica.sources, null, alpha);
      out.push_back(confusion(t.supports, run.truth.supports, run.match).fpr());
    }
    cell_fpr[cell] = std::move(out);
  });

  FprTable table;
  table.alphas.assign(alphas.begin(), alphas.end());
  table.n_seeds = n_seeds;
  table.fpr.resize(static_cast<Eigen::Index>(configs.size()), static_cast<Eigen::Index>(alphas.size()));
  for (std::size_t ci = 0; ci < configs.size(); ++ci) {
    table.conditions.push_back(condition_label(configs[ci]));
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      std::vector<double> values(n_seeds);
      for (std::size_t si = 0; si < n_seeds; ++si) values[si] = cell_fpr[ci * n_seeds + si][a];
      table.fpr(static_cast<Eigen::Index>(ci), static_cast<Eigen::Index>(a)) =
          stats::pairwise_sum(values) / double(n_seeds);
    }
  }
  return table;
}

void write_fpr_table_csv(const FprTable& table, std::ostream& out) {
  out << kCsvVersionLine << '\n';
  out << "# voxel-wise false positive rate, mean over " << table.n_seeds
      << " seeds; no multiple-comparison correction\n";
  out << "condition";
  for (double a : table.alphas) out << ',' << format_double(a);
  out << '\n';
  for (std::size_t c = 0; c < table.conditions.size(); ++c) {
    out << table.conditions[c];
    for (std::size_t a = 0; a < table.alphas.size(); ++a) {
      out << ',' << format_double(table.fpr(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(a)));
    }
    out << '\n';
  }
}

void write_roc_csv(std::span<const RocRecord> records, std::ostream& out) {
  out << kCsvVersionLine << '\n';
  out << "condition,fpr,tpr,alpha,method,seed,auc\n";
  for (const RocRecord& r : records) {
    for (const RocPoint& p : r.curve.points) {
      out << r.condition << ',' << format_double(p.fpr) << ',' << format_double(p.tpr) << ','
          << format_double(p.parameter) << ',' << r.method << ',' << r.seed << ',' << format_double(r.curve.auc)
          << '\n';
    }
  }
}

std::vector<RocRecord> roc_study(std::span<const SimConfig> configs, const RocStudyOptions& options) {
  if (options.n_seeds == 0) throw InvalidArgument("roc_study: n_seeds must be positive");
  if (options.methods.empty()) throw InvalidArgument("roc_study: no threshold methods given");
  const std::size_t n_methods = options.methods.size();
  const std::size_t n_cells = configs.size() * options.n_seeds;
  std::vector<RocRecord> records(n_cells * n_methods);
  detail::parallel_for(n_cells, [&](std::size_t cell) {
    const std::size_t ci = cell / options.n_seeds, si = cell % options.n_seeds;
    SimConfig cfg = configs[ci];
    cfg.seed = replicate_seed(configs[ci].seed, si);
    PipelineOptions opts = options.pipeline;
    opts.ica.seed = derive_seed(cfg.seed, kIcaStream);
    const SimulationRun run = run_simulation(cfg, opts);
    RocOptions roc;
    roc.n_directions = opts.n_directions;
    roc.seed = derive_seed(cfg.seed, kNullStream);
    roc.mixture = options.mixture;
    roc.mixture.seed = roc.seed;
    for (std::size_t m = 0; m < n_methods; ++m) {
      const ThresholdMethod method = options.methods[m];
      const auto& grid = method == ThresholdMethod::mixture ? options.ratios : options.alphas;
      RocRecord& r = records[(ci * n_methods + m) * options.n_seeds + si];
      r.condition = condition_label(configs[ci]);
      r.method = to_string(method);
      r.seed = cfg.seed;
      r.curve = roc_sweep(run.decomposition.ica.sources, run.truth, grid, method, roc);
    }
  });
  return records;
}

std::vector<double> mean_auc(std::span<const RocRecord> records, std::size_t n_seeds) {
  if (n_seeds == 0 || records.size() % n_seeds != 0) throw InvalidArgument("mean_auc: records not a multiple of n_seeds");
  std::vector<double> out;
  for (std::size_t g = 0; g < records.size() / n_seeds; ++g) {
    std::vector<double> aucs;
    for (std::size_t s = 0; s < n_seeds; ++s) aucs.push_back(records[g * n_seeds + s].curve.auc);
    out.push_back(stats::pairwise_sum(aucs) / double(n_seeds));
  }
  return out;
}

Dataset subsample_frames(const Dataset& y, std::size_t k, std::size_t offset) {
  if (k == 0 || offset >= k) throw InvalidArgument("subsample_frames: need 0 <= offset < k");
  const std::size_t n = (y.n_time() - offset + k - 1) / k;
  Matrix out(static_cast<Eigen::Index>(n), y.data().cols());
  for (std::size_t t = 0; t < n; ++t) out.row(static_cast<Eigen::Index>(t)) = y.data().row(static_cast<Eigen::Index>(offset + t * k));
  return Dataset(std::move(out), y.grid(), y.meta());
}

ConsistencyReport downsample_consistency(const Dataset& y, const ConsistencyOptions& options) {
  if (options.k == 0) throw InvalidArgument("downsample_consistency: k must be positive");
  if (y.n_time() < 3 * options.k) {
    throw InvalidArgument("downsample_consistency: " + std::to_string(y.n_time()) + " time points, need at least " +
                          std::to_string(3 * options.k) + " for k = " + std::to_string(options.k));
  }
  PipelineOptions pipe;
  pipe.ica = options.ica;
  pipe.null_kind = options.null_kind;
  pipe.n_directions = options.n_directions;
  pipe.null_seed = options.seed;

  const Decomposition reference = decompose(y, options.n_components, options.ica);
  const ThresholdResult ref_t =
      threshold_components(reference.ica.sources, build_null(reference.ica.sources, pipe), options.alpha);

  ConsistencyReport report;
  report.reference_selected = ref_t.n_selected();
  for (std::size_t offset = 0; offset < options.k; ++offset) {
    const Dataset sub = subsample_frames(y, options.k, offset);
    const Decomposition dec = decompose(sub, options.n_components, options.ica);
    const ThresholdResult t = threshold_components(dec.ica.sources, build_null(dec.ica.sources, pipe), options.alpha);
    const MatchResult match = match_components(dec.ica.sources, reference.ica.sources.patterns());
    ConsistencyRun run;
    run.offset = offset;
    run.n_time = sub.n_time();
    run.counts = confusion(t.supports, ref_t.supports, match);
    run.mean_correlation = stats::mean(match.correlations);
    report.runs.push_back(run);
  }
  return report;
}

void write_consistency_csv(const ConsistencyReport& report, std::ostream& out) {
  out << kCsvVersionLine << '\n';
  out << "# pseudo ground truth = supports on the full series; observed fpr may be corrected by a factor "
      << report.pseudo_truth_correction << " (not applied)\n";
  out << "offset,n_time,tp,fp,tn,fn,fpr,tpr,mean_correlation\n";
  for (const ConsistencyRun& r : report.runs) {
    out << r.offset << ',' << r.n_time << ',' << r.counts.tp << ',' << r.counts.fp << ',' << r.counts.tn << ','
        << r.counts.fn << ',' << format_double(r.fpr()) << ',' << format_double(r.tpr()) << ','
        << format_double(r.mean_correlation) << '\n';
  }
}

Dataset synthetic_time_series(const SimTruth& truth, std::size_t n_time, double observation_noise, Seed seed,
                              double smoothness) {
  if (n_time < 2) throw InvalidArgument("synthetic_time_series: need at least 2 time points");
  const Matrix& c = truth.observed.patterns();
  const Eigen::Index k = c.rows();
  const std::vector<double> kernel = gaussian_kernel(fwhm_to_sd(smoothness));
  const std::size_t pad = kernel.size() / 2;

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix loadings(static_cast<Eigen::Index>(n_time), k);
  for (Eigen::Index j = 0; j < k; ++j) {
    std::vector<double> white(n_time + 2 * pad);
    for (double& v : white) v = normal(rng);
    std::vector<double> course(n_time);
    for (std::size_t t = 0; t < n_time; ++t) {
      double acc = 0.0;
      for (std::size_t i = 0; i < kernel.size(); ++i) acc += kernel[i] * white[t + i];
      course[t] = acc;
    }
    stats::standardize(course);
    for (std::size_t t = 0; t < n_time; ++t) loadings(static_cast<Eigen::Index>(t), j) = course[t];
  }
  Matrix y = loadings * c;
  if (observation_noise > 0.0) {
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] += observation_noise * normal(rng);
  }
  std::map<std::string, std::string> meta{{"seed", std::to_string(seed)}, {"created_by", "synthetic_time_series"}};
  return Dataset(std::move(y), truth.config.grid, std::move(meta));
}

std::vector<SimConfig> table_conditions(Seed base_seed) {
  std::vector<SimConfig> configs;
  for (double sigma : {0.15, 0.20, 0.30}) {
    for (bool super : {false, true}) {
      SimConfig c;
      c.sigma = sigma;
      if (super) c.target_kurtosis = 4.0;
      c.seed = base_seed;
      configs.push_back(c);
    }
  }
  return configs;
}

}  // namespace sica
