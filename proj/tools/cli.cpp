#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sica/errors.hpp"
#include "sica/eval.hpp"
#include "sica/matrix_io.hpp"
#include "sica/random.hpp"
#include "sica/simgen.hpp"
#include "sica/stats.hpp"
#include "sica/version.hpp"

namespace sica::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr const char* kNoCorrectionNote =
    "note: thresholds are per-voxel; no multiple-comparison correction is applied";

Grid parse_grid(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument("no separator");
    std::size_t used = 0;
    const auto h = std::stoul(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument("trailing characters");
    const auto w = std::stoul(text.substr(x + 1), &used);
    if (used != text.size() - x - 1) throw std::invalid_argument("trailing characters");
    return Grid{h, w};
  } catch (const std::exception&) {
    throw InvalidArgument("invalid grid '" + text + "': expected HEIGHTxWIDTH, e.g. 80x80");
  }
}

std::string grid_string(Grid g) { return std::to_string(g.height) + "x" + std::to_string(g.width); }

std::string json_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw UsageError("config values must be scalars or arrays of scalars, got " + v.dump());
}

// Fills every option of `cmd` that was not given on the command line from the
// JSON object in `path`. Keys are option names without the leading dashes;
// underscores and dashes are interchangeable.
void merge_config(CLI::App& cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("malformed config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file " + path + " must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    if (name == "config") throw UsageError("config files cannot include other config files");
    CLI::Option* opt = nullptr;
    try {
      opt = cmd.get_option("--" + name);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError("unknown config key '" + key + "' for command " + cmd.get_name());
    }
    if (opt->count() > 0) continue;
    if (name == "grid" && value.is_array() && value.size() == 2) {
      opt->add_result(value[0].dump() + "x" + value[1].dump());
    } else if (value.is_array()) {
      for (const auto& v : value) opt->add_result(json_scalar(v));
    } else {
      opt->add_result(json_scalar(value));
    }
    try {
      opt->run_callback();
    } catch (const CLI::ParseError& e) {
      throw UsageError("config key '" + key + "': " + e.what());
    }
  }
}

void require_file(const std::string& path, const std::string& flag) {
  if (path.empty()) throw UsageError(flag + " is required");
  if (!fs::is_regular_file(path)) throw UsageError(flag + ": no such file " + path);
}

void require_set(const std::string& value, const std::string& flag) {
  if (value.empty()) throw UsageError(flag + " is required");
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(FormatError::Kind::io, "cannot write " + path.string());
  out << text;
}

std::optional<Grid> grid_for(const fs::path& matrix_path) {
  if (auto side = read_sidecar(matrix_path); side && side->grid) return side->grid;
  const fs::path config = matrix_path.parent_path() / "config.json";
  if (fs::is_regular_file(config)) {
    std::ifstream in(config);
    std::stringstream text;
    text << in.rdbuf();
    return config_from_json(text.str()).grid;
  }
  return std::nullopt;
}

std::optional<Grid> checked_grid(std::optional<Grid> grid, std::size_t n_voxels) {
  if (grid && grid->size() != n_voxels) return std::nullopt;
  return grid;
}

// Options shared by every command.
struct Common {
  Seed seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string config;
};

void add_common(CLI::App* cmd, Common& c, bool needs_seed) {
  if (needs_seed) {
    c.seed_opt = cmd->add_option("--seed", c.seed, "64-bit seed for all randomness (required)");
  }
  cmd->add_option("--config", c.config, "JSON file of option values; command-line flags take precedence");
}

// Simulation geometry and noise options, bound straight into a SimConfig.
struct SimFlags {
  SimConfig config;
  std::string grid = "80x80";
  double kurtosis = 0.0;
  CLI::Option* kurtosis_opt = nullptr;

  void add(CLI::App* cmd, bool noise) {
    cmd->add_option("--grid", grid, "grid size HEIGHTxWIDTH")->capture_default_str();
    cmd->add_option("--sources", config.n_sources, "number of sources")->capture_default_str();
    cmd->add_option("--amplitude", config.rect_amplitude, "rectangle amplitude")->capture_default_str();
    cmd->add_option("--min-side", config.rect_min_side, "smallest rectangle side in pixels")->capture_default_str();
    cmd->add_option("--max-side", config.rect_max_side, "largest rectangle side in pixels")->capture_default_str();
    cmd->add_option("--empty-sources", config.n_empty_sources, "trailing sources without rectangles")
        ->capture_default_str();
    cmd->add_option("--fragmented-amplitude", config.fragmented_amplitude,
                    "std of the spiky field placed in empty sources (0 = none)")
        ->capture_default_str();
    cmd->add_option("--fwhm", config.fwhm, "smoothing FWHM in pixels")->capture_default_str();
    cmd->add_option("--smooth-sources", config.smooth_sources, "smooth the rectangle maps (true/false)")
        ->capture_default_str();
    if (noise) {
      cmd->add_option("--sigma", config.sigma, "noise standard deviation")->capture_default_str();
      cmd->add_option("--theta", config.theta, "Gaussian/super-Gaussian balance in radians")
          ->capture_default_str();
      kurtosis_opt = cmd->add_option("--kurtosis", kurtosis, "target noise kurtosis; solves theta");
    }
  }

  SimConfig resolve(Seed seed) const {
    SimConfig c = config;
    c.grid = parse_grid(grid);
    if (kurtosis_opt && kurtosis_opt->count() > 0) c.target_kurtosis = kurtosis;
    c.seed = seed;
    c.validate();
    return c;
  }
};

std::vector<SimConfig> conditions(const SimConfig& base, const std::vector<double>& sigmas,
                                  const std::vector<std::string>& kinds, double kurtosis) {
  std::vector<SimConfig> out;
  for (double sigma : sigmas) {
    for (const std::string& kind : kinds) {
      SimConfig c = base;
      c.sigma = sigma;
      c.theta = 0.0;
      c.target_kurtosis.reset();
      if (kind == "super-gaussian") {
        c.target_kurtosis = kurtosis;
      } else if (kind != "gaussian") {
        throw InvalidArgument("unknown noise kind '" + kind + "' (expected gaussian or super-gaussian)");
      }
      c.validate();
      out.push_back(c);
    }
  }
  return out;
}

std::string fixed(double v, int digits = 6) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

// ---------------------------------------------------------------------------

struct SimulateCmd {
  Common common;
  SimFlags sim;
  std::string out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("simulate", "generate a synthetic sparse-source dataset");
    add_common(cmd, common, true);
    sim.add(cmd, true);
    cmd->add_option("--out", out, "output directory (required)");
  }

  void run(std::ostream& os) {
    require_set(out, "--out");
    const SimConfig cfg = sim.resolve(common.seed);
    const SimTruth truth = simulate(cfg);
    save_truth(truth, out);
    os << "wrote " << out << ": " << cfg.n_sources << " sources on " << grid_string(cfg.grid) << ", sigma "
       << cfg.sigma << ", theta " << fixed(truth.config.theta) << '\n';
  }
};

struct DecomposeCmd {
  Common common;
  std::string input, out, grid, contrast = "logcosh";
  std::size_t components = 0;
  IcaOptions ica;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("decompose", "PCA whitening followed by FastICA");
    add_common(cmd, common, true);
    cmd->add_option("--input", input, "observed data, SICA1 matrix of time points x voxels (required)");
    cmd->add_option("--components", components, "number of components (0 = one per input row)")
        ->capture_default_str();
    cmd->add_option("--contrast", contrast, "FastICA contrast")
        ->check(CLI::IsMember({"logcosh", "cube"}))
        ->capture_default_str();
    cmd->add_option("--tol", ica.tol, "convergence tolerance")->capture_default_str();
    cmd->add_option("--max-iter", ica.max_iter, "iterations per attempt")->capture_default_str();
    cmd->add_option("--restarts", ica.max_restarts, "restarts on non-convergence")->capture_default_str();
    cmd->add_option("--grid", grid, "grid HEIGHTxWIDTH (default: from the input's sidecar or config.json)");
    cmd->add_option("--out", out, "output directory (required)");
  }

  void run(std::ostream& os) {
    require_file(input, "--input");
    require_set(out, "--out");
    const Matrix y = read_matrix(input);
    const std::optional<Grid> g =
        grid.empty() ? checked_grid(grid_for(input), std::size_t(y.cols())) : std::optional<Grid>(parse_grid(grid));
    const Dataset data(y, g);
    ica.contrast = contrast_from_string(contrast);
    ica.seed = common.seed;
    const std::size_t k = components == 0 ? data.n_time() : components;
    const Decomposition dec = decompose(data, k, ica);

    fs::create_directories(out);
    const fs::path dir(out);
    write_matrix(dec.ica.sources.patterns(), dir / "B.sica");
    write_sidecar(dir / "B.sica", MatrixSidecar{common.seed, "sica decompose", g});
    write_matrix(dec.ica.mixing.matrix(), dir / "M.sica");

    json fit;
    fit["input"] = input;
    fit["n_components"] = k;
    fit["contrast"] = to_string(ica.contrast);
    fit["tol"] = ica.tol;
    fit["max_iter"] = ica.max_iter;
    fit["seed"] = common.seed;
    fit["converged"] = dec.ica.converged;
    fit["n_iterations"] = dec.ica.n_iterations;
    fit["n_restarts"] = dec.ica.n_restarts;
    fit["contrast_initial"] = dec.ica.contrast_initial;
    fit["contrast_final"] = dec.ica.contrast_final;
    fit["residual_variance"] = dec.pca.residual_variance;
    fit["singular_values"] = std::vector<double>(dec.pca.singular_values.begin(), dec.pca.singular_values.end());
    write_text(dir / "fit.json", fit.dump(2) + "\n");

    os << "wrote " << out << ": " << k << " components, converged " << (dec.ica.converged ? "true" : "false")
       << " after " << dec.ica.n_iterations << " iterations";
    if (dec.ica.n_restarts > 0) os << " (" << dec.ica.n_restarts << " restarts)";
    os << '\n';
  }
};

struct ThresholdCmd {
  Common common;
  std::string input, out, method = "gaussian";
  double alpha = 0.01, ratio = 1.0;
  std::size_t directions = kDefaultDirections;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("threshold", "select support voxels of whitened components");
    add_common(cmd, common, true);
    cmd->add_option("--input", input, "whitened components B, SICA1 matrix (required)");
    cmd->add_option("--method", method, "gaussian or empirical isotropy null, or the mixture baseline")
        ->check(CLI::IsMember({"gaussian", "empirical", "mixture"}))
        ->capture_default_str();
    cmd->add_option("--alpha", alpha, "per-voxel two-sided p-value (isotropy null)")->capture_default_str();
    cmd->add_option("--ratio", ratio, "activation/null posterior ratio (mixture)")->capture_default_str();
    cmd->add_option("--directions", directions, "random directions for the empirical null")
        ->capture_default_str();
    cmd->add_option("--out", out, "output directory (required)");
  }

  void run(std::ostream& os) {
    require_file(input, "--input");
    require_set(out, "--out");
    Matrix b = read_matrix(input);
    const auto g = checked_grid(grid_for(input), std::size_t(b.cols()));
    const ComponentSet comps(std::move(b), true, std::nullopt, g);
    const fs::path dir(out);
    fs::create_directories(dir);

    json j;
    Mask supports;
    if (method == "mixture") {
      if (!(ratio > 0.0)) throw InvalidArgument("--ratio must be positive");
      supports = Mask(comps.patterns().rows(), comps.patterns().cols());
      MixtureOptions mo;
      mo.seed = common.seed;
      json fits = json::array();
      for (Eigen::Index i = 0; i < comps.patterns().rows(); ++i) {
        const auto row = stats::row_span(comps.patterns(), i);
        const MixtureFit fit = fit_mixture(row, mo);
        const auto sel = threshold_mixture(fit, row, ratio);
        for (Eigen::Index v = 0; v < supports.cols(); ++v) supports(i, v) = sel[std::size_t(v)];
        fits.push_back({{"weights", fit.weights},
                        {"null_mean", fit.null_mean},
                        {"null_std", fit.null_std},
                        {"pos_shape", fit.pos_shape},
                        {"pos_scale", fit.pos_scale},
                        {"pos_shift", fit.pos_shift},
                        {"neg_shape", fit.neg_shape},
                        {"neg_scale", fit.neg_scale},
                        {"neg_shift", fit.neg_shift},
                        {"log_likelihood", fit.log_likelihood},
                        {"n_em_iterations", fit.n_em_iterations},
                        {"positive_removed", fit.positive_removed},
                        {"negative_removed", fit.negative_removed},
                        {"monotone", selection_is_monotone(fit, row, ratio)}});
      }
      j["method"] = "mixture";
      j["model"] = "melodic-like";
      j["ratio"] = ratio;
      j["seed"] = common.seed;
      j["fits"] = fits;
    } else {
      const NullModel null = method == "empirical" ? sample_null(comps, directions, common.seed)
                                                   : NullModel::gaussian();
      const ThresholdResult t = threshold_components(comps, null, alpha);
      supports = t.supports;
      j["alpha"] = t.alpha;
      j["tau"] = t.tau;
      j["method"] = to_string(t.method);
      j["n_directions"] = t.n_directions;
      j["seed"] = common.seed;
      if (null.unstable_tail) j["unstable_tail"] = true;
      os << "tau = " << fixed(t.tau) << '\n';
    }
    std::vector<std::size_t> per_component;
    for (Eigen::Index i = 0; i < supports.rows(); ++i) per_component.push_back(std::size_t(supports.row(i).count()));
    j["n_selected"] = std::accumulate(per_component.begin(), per_component.end(), std::size_t{0});
    j["selected_per_component"] = per_component;
    j["multiple_comparisons"] = "none";

    write_mask(supports, dir / "supports.sica");
    write_text(dir / "threshold.json", j.dump(2) + "\n");
    os << "selected " << j["n_selected"].get<std::size_t>() << " voxels\n" << kNoCorrectionNote << '\n';
  }
};

struct EvaluateCmd {
  Common common;
  std::string truth, components, supports, out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("evaluate", "score components and supports against a simulation");
    add_common(cmd, common, false);
    cmd->add_option("--truth", truth, "directory written by simulate (required)");
    cmd->add_option("--components", components, "estimated components B, SICA1 matrix (required)");
    cmd->add_option("--supports", supports, "selected supports, SICA1 mask");
    cmd->add_option("--out", out, "JSON report path (default: stdout)");
  }

  void run(std::ostream& os) {
    require_set(truth, "--truth");
    if (!fs::is_directory(truth)) throw UsageError("--truth: no such directory " + truth);
    require_file(components, "--components");
    if (!supports.empty()) require_file(supports, "--supports");

    const StoredTruth stored = load_truth(truth);
    // Regenerate the smoothed sources the observed data was built from.
    const SimTruth sim = simulate(stored.config);
    if (sim.observed.patterns() != stored.observed) {
      throw DegenerateDataError("evaluate: config.json in " + truth + " does not reproduce observed.sica");
    }
    const Matrix b = read_matrix(components);
    const MatchResult match = match_components(b, sim.smoothed_sources);

    json j;
    j["permutation"] = match.permutation;
    j["signs"] = match.signs;
    j["correlations"] = match.correlations;
    j["mean_correlation"] = stats::mean(match.correlations);
    if (!supports.empty()) {
      const Confusion c = confusion(read_mask(supports), stored.supports, match);
      j["tp"] = c.tp;
      j["fp"] = c.fp;
      j["tn"] = c.tn;
      j["fn"] = c.fn;
      j["fpr"] = c.fpr();
      j["tpr"] = c.tpr();
    }
    const std::string text = j.dump(2) + "\n";
    if (out.empty()) {
      os << text;
    } else {
      write_text(out, text);
      os << "wrote " << out << '\n';
    }
  }
};

struct StudyFlags {
  SimFlags sim;
  std::vector<double> sigmas{0.15, 0.20, 0.30};
  std::vector<std::string> kinds{"gaussian", "super-gaussian"};
  double kurtosis = 4.0;
  std::size_t seeds = 0;
  std::size_t components = 0;
  std::string null_kind = "gaussian";
  std::size_t directions = kDefaultDirections;

  void add(CLI::App* cmd, std::size_t default_seeds) {
    seeds = default_seeds;
    sim.add(cmd, false);
    cmd->add_option("--sigmas", sigmas, "noise levels")->delimiter(',')->capture_default_str();
    cmd->add_option("--noise", kinds, "noise kinds: gaussian, super-gaussian")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--kurtosis", kurtosis, "kurtosis of the super-Gaussian conditions")->capture_default_str();
    cmd->add_option("--seeds", seeds, "replicates per condition")->capture_default_str();
    cmd->add_option("--components", components, "components per decomposition (0 = number of sources)")
        ->capture_default_str();
    cmd->add_option("--null", null_kind, "isotropy null: gaussian or empirical")
        ->check(CLI::IsMember({"gaussian", "empirical"}))
        ->capture_default_str();
    cmd->add_option("--directions", directions, "random directions for the empirical null")
        ->capture_default_str();
  }

  PipelineOptions pipeline() const {
    PipelineOptions p;
    p.n_components = components;
    p.null_kind = null_kind_from_string(null_kind);
    p.n_directions = directions;
    return p;
  }
};

struct RocCmd {
  Common common;
  StudyFlags study;
  std::vector<std::string> methods{"isonull-gaussian", "mixture"};
  std::vector<double> alphas = default_alpha_grid();
  std::vector<double> ratios = default_ratio_grid();
  std::string out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("roc", "ROC curves of the thresholding methods on simulations");
    add_common(cmd, common, true);
    study.add(cmd, 10);
    cmd->add_option("--methods", methods, "isonull-gaussian, isonull-empirical, mixture")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--alphas", alphas, "p-values swept by the isotropy methods")->delimiter(',');
    cmd->add_option("--ratios", ratios, "posterior ratios swept by the mixture baseline")->delimiter(',');
    cmd->add_option("--out", out, "CSV output path (required)");
  }

  void run(std::ostream& os) {
    require_set(out, "--out");
    const SimConfig base = study.sim.resolve(common.seed);
    const auto configs = conditions(base, study.sigmas, study.kinds, study.kurtosis);
    RocStudyOptions opts;
    opts.methods.clear();
    for (const auto& m : methods) opts.methods.push_back(threshold_method_from_string(m));
    opts.alphas = alphas;
    opts.ratios = clamp_ratios(ratios);
    std::sort(opts.alphas.begin(), opts.alphas.end());
    std::sort(opts.ratios.begin(), opts.ratios.end());
    opts.n_seeds = study.seeds;
    opts.pipeline = study.pipeline();

    const auto records = roc_study(configs, opts);
    std::ostringstream csv;
    write_roc_csv(records, csv);
    write_text(out, csv.str());

    const auto aucs = mean_auc(records, opts.n_seeds);
    for (std::size_t g = 0; g < aucs.size(); ++g) {
      const RocRecord& r = records[g * opts.n_seeds];
      os << r.condition << ' ' << r.method << " mean auc " << fixed(aucs[g], 4) << '\n';
    }
    os << "wrote " << out << '\n';
  }
};

struct Table1Cmd {
  Common common;
  StudyFlags study;
  std::vector<double> alphas{5e-2, 1e-2, 5e-3};
  std::string out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("table1", "observed false positive rate versus specified p-value");
    add_common(cmd, common, true);
    study.add(cmd, 20);
    cmd->add_option("--alphas", alphas, "specified p-values")->delimiter(',')->capture_default_str();
    cmd->add_option("--out", out, "CSV output path (required)");
  }

  void run(std::ostream& os) {
    require_set(out, "--out");
    const SimConfig base = study.sim.resolve(common.seed);
    const auto configs = conditions(base, study.sigmas, study.kinds, study.kurtosis);
    PipelineOptions p = study.pipeline();
    const FprTable table = fpr_table(configs, alphas, study.seeds, p);
    std::ostringstream csv;
    write_fpr_table_csv(table, csv);
    write_text(out, csv.str());
    os << csv.str() << "wrote " << out << '\n' << kNoCorrectionNote << '\n';
  }
};

struct ConsistencyCmd {
  Common common;
  SimFlags sim;
  std::string input, out, grid, contrast = "logcosh";
  std::size_t time_points = 300;
  double obs_noise = 0.1;
  ConsistencyOptions opts;
  std::string null_kind = "gaussian";

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "consistency", "agreement of runs on interleaved subsampled series with the full-series result");
    add_common(cmd, common, true);
    cmd->add_option("--input", input, "time series, SICA1 matrix of time points x voxels (default: synthetic)");
    sim.add(cmd, true);
    cmd->add_option("--time-points", time_points, "length of the synthetic series")->capture_default_str();
    cmd->add_option("--obs-noise", obs_noise, "observation noise std of the synthetic series")
        ->capture_default_str();
    cmd->add_option("--k", opts.k, "keep one frame out of k")->capture_default_str();
    cmd->add_option("--components", opts.n_components, "components per decomposition")->capture_default_str();
    cmd->add_option("--contrast", contrast, "FastICA contrast")
        ->check(CLI::IsMember({"logcosh", "cube"}))
        ->capture_default_str();
    cmd->add_option("--alpha", opts.alpha, "per-voxel p-value")->capture_default_str();
    cmd->add_option("--null", null_kind, "isotropy null: gaussian or empirical")
        ->check(CLI::IsMember({"gaussian", "empirical"}))
        ->capture_default_str();
    cmd->add_option("--directions", opts.n_directions, "random directions for the empirical null")
        ->capture_default_str();
    cmd->add_option("--out", out, "CSV output path (required)");
  }

  void run(std::ostream& os) {
    require_set(out, "--out");
    std::optional<Dataset> y;
    if (!input.empty()) {
      require_file(input, "--input");
      const Matrix m = read_matrix(input);
      y.emplace(m, checked_grid(grid_for(input), std::size_t(m.cols())));
    } else {
      if (!(obs_noise >= 0.0)) throw InvalidArgument("--obs-noise must be >= 0");
      const SimTruth truth = simulate(sim.resolve(common.seed));
      y.emplace(synthetic_time_series(truth, time_points, obs_noise, derive_seed(common.seed, 40)));
    }
    opts.ica.contrast = contrast_from_string(contrast);
    opts.ica.seed = derive_seed(common.seed, 17);
    opts.seed = derive_seed(common.seed, 18);
    opts.null_kind = null_kind_from_string(null_kind);
    const ConsistencyReport report = downsample_consistency(*y, opts);
    std::ostringstream csv;
    write_consistency_csv(report, csv);
    write_text(out, csv.str());
    os << csv.str() << "wrote " << out << '\n';
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse-source ICA thresholding under an isotropy null", "sica"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("sica ") + SICA_VERSION_STRING);

  SimulateCmd simulate_cmd;
  DecomposeCmd decompose_cmd;
  ThresholdCmd threshold_cmd;
  EvaluateCmd evaluate_cmd;
  RocCmd roc_cmd;
  Table1Cmd table1_cmd;
  ConsistencyCmd consistency_cmd;
  simulate_cmd.add(app);
  decompose_cmd.add(app);
  threshold_cmd.add(app);
  evaluate_cmd.add(app);
  roc_cmd.add(app);
  table1_cmd.add(app);
  consistency_cmd.add(app);

  struct Entry {
    Common* common;
    std::function<void(std::ostream&)> run;
  };
  const std::map<std::string, Entry> commands{
      {"simulate", {&simulate_cmd.common, [&](std::ostream& os) { simulate_cmd.run(os); }}},
      {"decompose", {&decompose_cmd.common, [&](std::ostream& os) { decompose_cmd.run(os); }}},
      {"threshold", {&threshold_cmd.common, [&](std::ostream& os) { threshold_cmd.run(os); }}},
      {"evaluate", {&evaluate_cmd.common, [&](std::ostream& os) { evaluate_cmd.run(os); }}},
      {"roc", {&roc_cmd.common, [&](std::ostream& os) { roc_cmd.run(os); }}},
      {"table1", {&table1_cmd.common, [&](std::ostream& os) { table1_cmd.run(os); }}},
      {"consistency", {&consistency_cmd.common, [&](std::ostream& os) { consistency_cmd.run(os); }}},
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* cmd = app.get_subcommands().front();
  const Entry& entry = commands.at(cmd->get_name());
  try {
    if (!entry.common->config.empty()) merge_config(*cmd, entry.common->config);
    if (entry.common->seed_opt && entry.common->seed_opt->count() == 0) {
      throw UsageError("--seed is required: all randomness derives from an explicit seed");
    }
    entry.run(out);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "sica " << cmd->get_name() << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "sica " << cmd->get_name() << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "sica " << cmd->get_name() << ": error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace sica::cli
