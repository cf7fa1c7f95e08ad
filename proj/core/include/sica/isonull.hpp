#pragma once

#include <vector>

#include "sica/datamodel.hpp"

namespace sica {

// Null hypothesis: every direction of the whitened feature space is
// equivalent. Its distribution is that of |w^T B| for random unit w, either
// sampled from the data or taken as the unit-variance Gaussian it tends to in
// high dimension.

inline constexpr std::size_t kMinStableDirections = 50;
inline constexpr std::size_t kDefaultDirections = 1000;

struct NullModel {
  NullKind kind = NullKind::gaussian;
  std::vector<double> samples;  // pooled |w^T B|, ascending; empirical only
  std::size_t n_directions = 0;
  Seed seed = 0;
  bool unstable_tail = false;  // fewer than kMinStableDirections were drawn

  static NullModel gaussian() { return {}; }

  /// Probability under the null that |w^T B| exceeds tau.
  double survival(double tau) const;
};

enum class DirectionPolicy {
  strict,     // fewer than kMinStableDirections is an error
  allow_few,  // proceed and flag NullModel::unstable_tail
};

/// Unit directions (rows), normalized standard-Gaussian draws. Direction d
/// uses its own generator seeded from (seed, d).
Matrix random_directions(std::size_t dimension, std::size_t n_directions, Seed seed);

NullModel sample_null(const ComponentSet& b, std::size_t n_directions, Seed seed,
                      DirectionPolicy policy = DirectionPolicy::strict);

/// Empirical null from explicitly given unit directions (rows).
NullModel project_null(const ComponentSet& b, const Matrix& directions, Seed seed = 0);

/// 2 (1 - Phi(tau)).
double gaussian_two_sided_survival(double tau);

double threshold_for_pvalue(const NullModel& null, double alpha);

/// supports(i, v) = |patterns(i, v)| > tau.
ThresholdResult apply_threshold(const ComponentSet& b, double tau, double alpha);

/// threshold_for_pvalue followed by apply_threshold, with the null's
/// provenance recorded in the result.
ThresholdResult threshold_components(const ComponentSet& b, const NullModel& null, double alpha);

}  // namespace sica
