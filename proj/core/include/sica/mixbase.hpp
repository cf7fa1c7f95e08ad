#pragma once

#include <array>
#include <span>
#include <vector>

#include "sica/types.hpp"

namespace sica {

// Univariate mixture baseline in the style of MELODIC ("melodic-like"):
// a Gaussian null plus a shifted Gamma for positive activation and a
// mirrored shifted Gamma for negative activation, fitted by EM.

struct MixtureOptions {
  int max_iter = 500;
  double tol = 1e-9;  // relative log-likelihood improvement
  Seed seed = 0;
  // Gamma origins sit this many robust null standard deviations away from
  // the null center and stay fixed during EM.
  double tail_offset = 2.0;
};

struct MixtureFit {
  enum Class { kNull = 0, kPositive = 1, kNegative = 2 };

  std::array<double, 3> weights{1.0, 0.0, 0.0};
  double null_mean = 0.0;
  double null_std = 1.0;
  double pos_shape = 1.0, pos_scale = 1.0, pos_shift = 0.0;
  double neg_shape = 1.0, neg_scale = 1.0, neg_shift = 0.0;
  double log_likelihood = 0.0;
  int n_em_iterations = 0;
  bool converged = false;
  bool positive_removed = false;  // class collapsed and was refit without it
  bool negative_removed = false;
  Seed seed = 0;
  std::vector<double> log_likelihood_trace;

  double null_density(double x) const;
  double positive_density(double x) const;
  double negative_density(double x) const;
  double density(double x) const;

  /// P(activation | x) / P(null | x); +inf where the null density underflows.
  double activation_ratio(double x) const;
};

inline constexpr double kCollapsedWeight = 1e-6;
inline constexpr std::size_t kMinMixtureSamples = 100;

MixtureFit fit_mixture(std::span<const double> values, const MixtureOptions& options = {});
MixtureFit fit_mixture(std::span<const double> values, int max_iter, double tol, Seed seed);

/// Selects values whose activation-to-null posterior ratio exceeds `ratio`.
std::vector<bool> threshold_mixture(const MixtureFit& fit, std::span<const double> values,
                                    double ratio);

/// Default baseline sweep grid, clamped to [0.2, 50].
inline constexpr double kMinSweepRatio = 0.2;
inline constexpr double kMaxSweepRatio = 50.0;
std::vector<double> default_ratio_grid(std::size_t n = 15);
std::vector<double> clamp_ratios(std::span<const double> ratios);

/// True when, on each side of the null mean, the selected set at `ratio` is
/// an interval extending to infinity (selection monotone in |x|), checked on
/// the observed values.
bool selection_is_monotone(const MixtureFit& fit, std::span<const double> values, double ratio);

}  // namespace sica
