#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "sica/datamodel.hpp"

namespace sica {

/// Synthetic sparse-source dataset parameters. sigma is the standard
/// deviation of the noise field after smoothing; theta balances the Gaussian
/// (cos) and super-Gaussian (sin) noise terms and is solved from
/// target_kurtosis when that is set.
struct SimConfig {
  Grid grid{80, 80};
  std::size_t n_sources = 9;
  double rect_amplitude = 1.0;
  std::size_t rect_min_side = 3;
  std::size_t rect_max_side = 6;
  std::size_t n_empty_sources = 0;  // trailing sources left without rectangles
  // When positive, empty sources carry a spiky cubed-Gaussian field of this
  // standard deviation: diffuse structure with no support to detect.
  double fragmented_amplitude = 0.0;
  double sigma = 0.15;
  double theta = 0.0;
  std::optional<double> target_kurtosis;
  double fwhm = 2.0;
  bool smooth_sources = true;
  Seed seed = 0;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

struct SourceMaps {
  Matrix sources;  // n_sources x n_voxels
  Mask supports;
};

struct SimTruth {
  Matrix sources;             // unsmoothed rectangle maps
  Mask supports;              // sources != 0
  MixingMatrix mixing;        // orthogonal, det +1
  ComponentSet observed;      // C = M A_s + sigma (cos M E_g + sin E_ng)
  SimConfig config;           // theta filled in when solved
  Matrix smoothed_sources;    // A_s, including any fragmented fields
  Matrix gaussian_noise;      // E_g, jointly standardized
  Matrix supergaussian_noise; // E_ng, each row standardized
  Matrix unmixed;             // B with observed = mixing * B
};

/// Standard deviation of a Gaussian kernel with the given FWHM.
double fwhm_to_sd(double fwhm);

/// Normalized 1-D kernel truncated at ceil(4 sd).
std::vector<double> gaussian_kernel(double sd);

/// Separable Gaussian smoothing of a row-major map with zero padding.
std::vector<double> smooth_map(std::span<const double> map, Grid grid, double fwhm);

SourceMaps make_sources(const SimConfig& config);

std::vector<double> gaussian_field(Grid grid, double fwhm, Seed seed);
std::vector<double> supergaussian_field(Grid grid, double fwhm, Seed seed);

/// Number of grid-sized tiles used to reach at least 4 * 10^6 pixels.
std::size_t calibration_tiles(Grid grid);

/// Sample kurtosis of cos(theta) E_g + sin(theta) E_ng on the tiled
/// calibration field used by solve_theta.
double mixed_field_kurtosis(double theta, double fwhm, Grid grid, Seed seed);

/// Achievable kurtosis interval [K(0), K(pi/2)] on the calibration field.
std::pair<double, double> kurtosis_range(double fwhm, Grid grid, Seed seed);

double solve_theta(double target_kurtosis, double fwhm, Grid grid, Seed seed);

SimTruth simulate(const SimConfig& config);

/// Writes sources.sica, observed.sica, mixing.sica, supports.sica, config.json.
void save_truth(const SimTruth& truth, const std::filesystem::path& dir);

/// What save_truth persists; enough to score against.
struct StoredTruth {
  Matrix sources;
  Mask supports;
  Matrix mixing;
  Matrix observed;
  SimConfig config;
};
StoredTruth load_truth(const std::filesystem::path& dir);

std::string config_to_json(const SimConfig& config);
SimConfig config_from_json(const std::string& text);

}  // namespace sica
