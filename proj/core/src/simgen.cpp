#include "sica/simgen.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "json.hpp"
#include "sica/errors.hpp"
#include "sica/matrix_io.hpp"
#include "sica/random.hpp"
#include "sica/stats.hpp"

namespace sica {

namespace {

// Generator streams derived from SimConfig::seed.
constexpr std::uint64_t kSourceStream = 1;
constexpr std::uint64_t kMixingStream = 2;
constexpr std::uint64_t kThetaStream = 3;
constexpr std::uint64_t kGaussianStream = 1000;
constexpr std::uint64_t kSuperGaussianStream = 2000;
constexpr std::uint64_t kFragmentedStream = 3000;

constexpr double kCalibrationPixels = 4e6;
constexpr double kKurtosisTolerance = 0.1;

// In-place separable convolution of a (rows x cols) buffer; samples outside
// the buffer count as zero.
void convolve_separable(std::vector<double>& buf, std::size_t rows, std::size_t cols,
                        const std::vector<double>& kernel) {
  const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  std::vector<double> tmp(buf.size(), 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        const auto cc = static_cast<std::ptrdiff_t>(c) + k;
        if (cc < 0 || cc >= static_cast<std::ptrdiff_t>(cols)) continue;
        acc += kernel[static_cast<std::size_t>(k + radius)] * buf[r * cols + static_cast<std::size_t>(cc)];
      }
      tmp[r * cols + c] = acc;
    }
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
        const auto rr = static_cast<std::ptrdiff_t>(r) + k;
        if (rr < 0 || rr >= static_cast<std::ptrdiff_t>(rows)) continue;
        acc += kernel[static_cast<std::size_t>(k + radius)] * tmp[static_cast<std::size_t>(rr) * cols + c];
      }
      buf[r * cols + c] = acc;
    }
  }
}

// Smoothed white noise without boundary attenuation: draw on a grid padded by
// the kernel radius, convolve, keep the interior.
std::vector<double> smoothed_white_noise(Grid grid, double fwhm, Seed seed) {
  const std::vector<double> kernel = gaussian_kernel(fwhm_to_sd(fwhm));
  const std::size_t pad = kernel.size() / 2;
  const std::size_t rows = grid.height + 2 * pad, cols = grid.width + 2 * pad;
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> buf(rows * cols);
  for (double& v : buf) v = normal(rng);
  convolve_separable(buf, rows, cols, kernel);
  std::vector<double> out(grid.size());
  for (std::size_t r = 0; r < grid.height; ++r) {
    for (std::size_t c = 0; c < grid.width; ++c) out[grid.index(r, c)] = buf[(r + pad) * cols + c + pad];
  }
  return out;
}

// Rows jointly rescaled to zero mean and identity sample covariance.
void whiten_rows(Matrix& m) {
  m = m.colwise() - m.rowwise().mean();
  const Matrix cov = m * m.transpose() / double(m.cols() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.eigenvalues().minCoeff() <= 0.0) throw DegenerateDataError("noise fields are linearly dependent");
  const Matrix inv_sqrt = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                          eig.eigenvectors().transpose();
  m = inv_sqrt * m;
}

struct CalibrationField {
  std::vector<double> gaussian;
  std::vector<double> supergaussian;
};

CalibrationField calibration_field(double fwhm, Grid grid, Seed seed) {
  CalibrationField field;
  const std::size_t tiles = calibration_tiles(grid);
  field.gaussian.reserve(tiles * grid.size());
  field.supergaussian.reserve(tiles * grid.size());
  for (std::size_t t = 0; t < tiles; ++t) {
    const auto g = gaussian_field(grid, fwhm, derive_seed(seed, 2 * t));
    const auto ng = supergaussian_field(grid, fwhm, derive_seed(seed, 2 * t + 1));
    field.gaussian.insert(field.gaussian.end(), g.begin(), g.end());
    field.supergaussian.insert(field.supergaussian.end(), ng.begin(), ng.end());
  }
  return field;
}

double mix_kurtosis(const CalibrationField& field, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  std::vector<double> mix(field.gaussian.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = c * field.gaussian[i] + s * field.supergaussian[i];
  return stats::kurtosis(mix);
}

}  // namespace

void SimConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw InvalidArgument("invalid simulation config: " + field + " " + why);
  };
  if (grid.height < 8 || grid.width < 8) fail("grid", "dimensions must be at least 8");
  if (n_sources < 1) fail("n_sources", "must be at least 1");
  if (n_empty_sources > n_sources) fail("n_empty_sources", "exceeds n_sources");
  if (!(rect_amplitude >= 0.0) || !std::isfinite(rect_amplitude)) fail("rect_amplitude", "must be >= 0");
  if (rect_min_side < 1 || rect_min_side > rect_max_side) fail("rect_min_side", "must lie in [1, rect_max_side]");
  if (rect_max_side > std::min(grid.height, grid.width)) fail("rect_max_side", "exceeds the grid");
  if (!(fragmented_amplitude >= 0.0) || !std::isfinite(fragmented_amplitude)) {
    fail("fragmented_amplitude", "must be >= 0");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) fail("sigma", "must be finite and >= 0");
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2)) fail("theta", "must lie in [0, pi/2]");
  if (target_kurtosis && !(*target_kurtosis >= 3.0)) fail("target_kurtosis", "must be >= 3");
  if (!(fwhm > 0.0) || !std::isfinite(fwhm)) fail("fwhm", "must be > 0");
}

double fwhm_to_sd(double fwhm) { return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))); }

std::vector<double> gaussian_kernel(double sd) {
  if (!(sd > 0.0)) throw InvalidArgument("gaussian_kernel: sd must be positive");
  const auto radius = static_cast<std::size_t>(std::ceil(4.0 * sd));
  std::vector<double> k(2 * radius + 1);
  double total = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double x = double(i) - double(radius);
    k[i] = std::exp(-x * x / (2.0 * sd * sd));
    total += k[i];
  }
  for (double& v : k) v /= total;
  return k;
}

std::vector<double> smooth_map(std::span<const double> map, Grid grid, double fwhm) {
  if (map.size() != grid.size()) throw InvalidArgument("smooth_map: map size does not match grid");
  std::vector<double> buf(map.begin(), map.end());
  convolve_separable(buf, grid.height, grid.width, gaussian_kernel(fwhm_to_sd(fwhm)));
  return buf;
}

SourceMaps make_sources(const SimConfig& config) {
  config.validate();
  const Grid g = config.grid;
  SourceMaps maps{Matrix::Zero(static_cast<Eigen::Index>(config.n_sources), static_cast<Eigen::Index>(g.size())),
                  Mask::Constant(static_cast<Eigen::Index>(config.n_sources), static_cast<Eigen::Index>(g.size()),
                                 false)};
  Rng rng(derive_seed(config.seed, kSourceStream));
  std::uniform_int_distribution<std::size_t> side(config.rect_min_side, config.rect_max_side);
  std::bernoulli_distribution two_rects(0.5);

  struct Rect {
    std::size_t r0, c0, h, w;
    bool overlaps(const Rect& o) const {
      return r0 < o.r0 + o.h && o.r0 < r0 + h && c0 < o.c0 + o.w && o.c0 < c0 + w;
    }
  };

  const std::size_t n_active = config.n_sources - config.n_empty_sources;
  for (std::size_t i = 0; i < n_active; ++i) {
    const std::size_t n_rects = two_rects(rng) ? 2 : 1;
    std::vector<Rect> placed;
    for (std::size_t k = 0; k < n_rects; ++k) {
      bool ok = false;
      for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
        Rect rect{0, 0, side(rng), side(rng)};
        rect.r0 = std::uniform_int_distribution<std::size_t>(0, g.height - rect.h)(rng);
        rect.c0 = std::uniform_int_distribution<std::size_t>(0, g.width - rect.w)(rng);
        ok = std::none_of(placed.begin(), placed.end(), [&](const Rect& o) { return rect.overlaps(o); });
        if (ok) placed.push_back(rect);
      }
      if (!ok) {
        throw InvalidArgument("make_sources: could not place a rectangle in source " + std::to_string(i) +
                              " after 100 attempts (grid too small)");
      }
    }
    for (const Rect& rect : placed) {
      for (std::size_t r = rect.r0; r < rect.r0 + rect.h; ++r) {
        for (std::size_t c = rect.c0; c < rect.c0 + rect.w; ++c) {
          maps.sources(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(g.index(r, c))) =
              config.rect_amplitude;
        }
      }
    }
  }
  maps.supports = maps.sources.array() != 0.0;
  return maps;
}

std::vector<double> gaussian_field(Grid grid, double fwhm, Seed seed) {
  if (!(fwhm > 0.0)) throw InvalidArgument("gaussian_field: fwhm must be positive");
  std::vector<double> field = smoothed_white_noise(grid, fwhm, seed);
  stats::standardize(field);
  return field;
}

std::vector<double> supergaussian_field(Grid grid, double fwhm, Seed seed) {
  std::vector<double> field = gaussian_field(grid, fwhm, seed);
  for (double& v : field) v = v * v * v;
  stats::standardize(field);
  return field;
}

std::size_t calibration_tiles(Grid grid) {
  return static_cast<std::size_t>(std::ceil(kCalibrationPixels / double(grid.size())));
}

double mixed_field_kurtosis(double theta, double fwhm, Grid grid, Seed seed) {
  return mix_kurtosis(calibration_field(fwhm, grid, seed), theta);
}

std::pair<double, double> kurtosis_range(double fwhm, Grid grid, Seed seed) {
  const CalibrationField field = calibration_field(fwhm, grid, seed);
  return {mix_kurtosis(field, 0.0), mix_kurtosis(field, std::numbers::pi / 2)};
}

double solve_theta(double target_kurtosis, double fwhm, Grid grid, Seed seed) {
  if (!(target_kurtosis >= 3.0)) {
    throw InvalidArgument("solve_theta: target kurtosis must be >= 3, got " + std::to_string(target_kurtosis));
  }
  const CalibrationField field = calibration_field(fwhm, grid, seed);
  const double k_low = mix_kurtosis(field, 0.0);
  const double k_high = mix_kurtosis(field, std::numbers::pi / 2);
  if (target_kurtosis <= std::max(k_low, 3.0)) return 0.0;
  if (target_kurtosis >= k_high) {
    if (target_kurtosis - k_high <= kKurtosisTolerance) return std::numbers::pi / 2;
    std::ostringstream msg;
    msg << "solve_theta: target kurtosis " << target_kurtosis << " outside achievable range [" << k_low << ", "
        << k_high << "]";
    throw InvalidArgument(msg.str());
  }
  double lo = 0.0, hi = std::numbers::pi / 2;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mix_kurtosis(field, mid) < target_kurtosis) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-9) break;
  }
  return 0.5 * (lo + hi);
}

SimTruth simulate(const SimConfig& config) {
  config.validate();
  SimConfig cfg = config;
  if (cfg.target_kurtosis) {
    cfg.theta = solve_theta(*cfg.target_kurtosis, cfg.fwhm, cfg.grid, derive_seed(cfg.seed, kThetaStream));
  }

  SourceMaps maps = make_sources(cfg);
  const auto n = static_cast<Eigen::Index>(cfg.n_sources);
  const auto v = static_cast<Eigen::Index>(cfg.grid.size());

  Matrix mixing = random_orthogonal(n, derive_seed(cfg.seed, kMixingStream));
  if (mixing.determinant() < 0.0) mixing.col(0) *= -1.0;

  Matrix smoothed = maps.sources;
  if (cfg.smooth_sources) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto row = smooth_map(stats::row_span(maps.sources, i), cfg.grid, cfg.fwhm);
      smoothed.row(i) = Eigen::Map<const RowVector>(row.data(), v);
    }
  }
  if (cfg.fragmented_amplitude > 0.0) {
    for (Eigen::Index i = n - static_cast<Eigen::Index>(cfg.n_empty_sources); i < n; ++i) {
      const auto f =
          supergaussian_field(cfg.grid, cfg.fwhm, derive_seed(cfg.seed, kFragmentedStream + std::uint64_t(i)));
      smoothed.row(i) = cfg.fragmented_amplitude * Eigen::Map<const RowVector>(f.data(), v);
    }
  }

  const double c = std::cos(cfg.theta), s = std::sin(cfg.theta);
  Matrix e_g(n, v), e_ng = Matrix::Zero(n, v);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto f = gaussian_field(cfg.grid, cfg.fwhm, derive_seed(cfg.seed, kGaussianStream + std::uint64_t(i)));
    e_g.row(i) = Eigen::Map<const RowVector>(f.data(), v);
  }
  if (n > 1) whiten_rows(e_g);
  if (s != 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto f =
          supergaussian_field(cfg.grid, cfg.fwhm, derive_seed(cfg.seed, kSuperGaussianStream + std::uint64_t(i)));
      e_ng.row(i) = Eigen::Map<const RowVector>(f.data(), v);
    }
  }

  // Gaussian noise lives in the source basis and is rotated with the sources;
  // the super-Gaussian term is added in the observation basis.
  Matrix observed = mixing * smoothed;
  if (cfg.sigma != 0.0) observed += cfg.sigma * (c * (mixing * e_g) + s * e_ng);
  Matrix unmixed = mixing.transpose() * observed;

  return SimTruth{std::move(maps.sources),
                  std::move(maps.supports),
                  MixingMatrix(mixing),
                  ComponentSet(std::move(observed), false, std::nullopt, cfg.grid),
                  cfg,
                  std::move(smoothed),
                  std::move(e_g),
                  std::move(e_ng),
                  std::move(unmixed)};
}

std::string config_to_json(const SimConfig& config) {
  nlohmann::json j;
  j["grid"] = {config.grid.height, config.grid.width};
  j["n_sources"] = config.n_sources;
  j["rect_amplitude"] = config.rect_amplitude;
  j["rect_min_side"] = config.rect_min_side;
  j["rect_max_side"] = config.rect_max_side;
  j["n_empty_sources"] = config.n_empty_sources;
  j["fragmented_amplitude"] = config.fragmented_amplitude;
  j["sigma"] = config.sigma;
  j["theta"] = config.theta;
  j["target_kurtosis"] = config.target_kurtosis ? nlohmann::json(*config.target_kurtosis) : nlohmann::json();
  j["fwhm"] = config.fwhm;
  j["smooth_sources"] = config.smooth_sources;
  j["seed"] = config.seed;
  j["created_by"] = "sica simulate";
  return j.dump(2);
}

SimConfig config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed simulation config: ") + e.what());
  }
  SimConfig c;
  try {
    if (j.contains("grid")) c.grid = Grid{j["grid"][0].get<std::size_t>(), j["grid"][1].get<std::size_t>()};
    c.n_sources = j.value("n_sources", c.n_sources);
    c.rect_amplitude = j.value("rect_amplitude", c.rect_amplitude);
    c.rect_min_side = j.value("rect_min_side", c.rect_min_side);
    c.rect_max_side = j.value("rect_max_side", c.rect_max_side);
    c.n_empty_sources = j.value("n_empty_sources", c.n_empty_sources);
    c.fragmented_amplitude = j.value("fragmented_amplitude", c.fragmented_amplitude);
    c.sigma = j.value("sigma", c.sigma);
    c.theta = j.value("theta", c.theta);
    if (j.contains("target_kurtosis") && !j["target_kurtosis"].is_null()) {
      c.target_kurtosis = j["target_kurtosis"].get<double>();
    }
    c.fwhm = j.value("fwhm", c.fwhm);
    c.smooth_sources = j.value("smooth_sources", c.smooth_sources);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("invalid simulation config field: ") + e.what());
  }
  return c;
}

void save_truth(const SimTruth& truth, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw FormatError(FormatError::Kind::io, "cannot create directory " + dir.string());
  write_matrix(truth.sources, dir / "sources.sica");
  write_matrix(truth.observed.patterns(), dir / "observed.sica");
  write_matrix(truth.mixing.matrix(), dir / "mixing.sica");
  write_mask(truth.supports, dir / "supports.sica");
  std::ofstream out(dir / "config.json");
  if (!out) throw FormatError(FormatError::Kind::io, "cannot write " + (dir / "config.json").string());
  out << config_to_json(truth.config) << '\n';
}

StoredTruth load_truth(const std::filesystem::path& dir) {
  std::ifstream in(dir / "config.json");
  if (!in) throw FormatError(FormatError::Kind::io, "cannot read " + (dir / "config.json").string());
  std::stringstream text;
  text << in.rdbuf();
  return StoredTruth{read_matrix(dir / "sources.sica"), read_mask(dir / "supports.sica"),
                     read_matrix(dir / "mixing.sica"), read_matrix(dir / "observed.sica"),
                     config_from_json(text.str())};
}

}  // namespace sica
