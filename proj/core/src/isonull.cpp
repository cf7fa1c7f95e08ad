#include "sica/isonull.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sica/errors.hpp"
#include "sica/random.hpp"
#include "sica/stats.hpp"

namespace sica {

double gaussian_two_sided_survival(double tau) {
  if (tau <= 0.0) return 1.0;
  return std::erfc(tau / std::sqrt(2.0));
}

double NullModel::survival(double tau) const {
  if (kind == NullKind::gaussian) return gaussian_two_sided_survival(tau);
  if (samples.empty()) throw InvalidArgument("empirical null model holds no samples");
  const auto above = samples.end() - std::upper_bound(samples.begin(), samples.end(), tau);
  return double(above) / double(samples.size());
}

Matrix random_directions(std::size_t dimension, std::size_t n_directions, Seed seed) {
  if (dimension == 0) throw InvalidArgument("random_directions: dimension must be positive");
  Matrix directions(static_cast<Eigen::Index>(n_directions), static_cast<Eigen::Index>(dimension));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t d = 0; d < n_directions; ++d) {
    Rng rng(derive_seed(seed, d));
    auto row = directions.row(static_cast<Eigen::Index>(d));
    double norm = 0.0;
    do {
      for (Eigen::Index j = 0; j < row.size(); ++j) row(j) = normal(rng);
      norm = row.norm();
    } while (norm == 0.0);
    row /= norm;
  }
  return directions;
}

NullModel project_null(const ComponentSet& b, const Matrix& directions, Seed seed) {
  if (directions.cols() != static_cast<Eigen::Index>(b.n_components())) {
    throw InvalidArgument("project_null: directions have " + std::to_string(directions.cols()) +
                          " coordinates for " + std::to_string(b.n_components()) + " components");
  }
  if (directions.rows() == 0) throw InvalidArgument("project_null: no directions given");
  for (Eigen::Index d = 0; d < directions.rows(); ++d) {
    if (std::abs(directions.row(d).norm() - 1.0) > 1e-9) {
      throw InvalidArgument("project_null: direction " + std::to_string(d) + " is not a unit vector");
    }
  }
  const Matrix projected = (directions * b.patterns()).cwiseAbs();
  NullModel null;
  null.kind = NullKind::empirical;
  null.samples.assign(projected.data(), projected.data() + projected.size());
  std::sort(null.samples.begin(), null.samples.end());
  null.n_directions = static_cast<std::size_t>(directions.rows());
  null.seed = seed;
  null.unstable_tail = null.n_directions < kMinStableDirections;
  return null;
}

NullModel sample_null(const ComponentSet& b, std::size_t n_directions, Seed seed, DirectionPolicy policy) {
  if (n_directions == 0) throw InvalidArgument("sample_null: n_directions must be positive");
  if (n_directions < kMinStableDirections && policy == DirectionPolicy::strict) {
    throw UnstableTailError("sample_null: " + std::to_string(n_directions) +
                            " directions leave the null tail unstable (need at least " +
                            std::to_string(kMinStableDirections) + ")");
  }
  const RowStatistics stats = row_statistics(b.patterns());
  for (Eigen::Index i = 0; i < stats.variance.size(); ++i) {
    if (std::abs(stats.variance(i) - 1.0) > ComponentSet::kVarianceTolerance) {
      throw InvalidArgument("sample_null: component " + std::to_string(i) + " has variance " +
                            std::to_string(stats.variance(i)) + ", expected unit-variance rows");
    }
  }
  return project_null(b, random_directions(b.n_components(), n_directions, seed), seed);
}

double threshold_for_pvalue(const NullModel& null, double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.5)) {
    throw InvalidArgument("threshold_for_pvalue: alpha must lie in (0, 0.5], got " + std::to_string(alpha));
  }
  if (null.kind == NullKind::gaussian) return stats::normal_quantile(1.0 - alpha / 2.0);

  const double needed = 10.0 / alpha;
  if (double(null.samples.size()) < needed) {
    throw UnstableTailError("threshold_for_pvalue: empirical null has " + std::to_string(null.samples.size()) +
                            " samples, alpha = " + std::to_string(alpha) + " needs at least " +
                            std::to_string(static_cast<std::size_t>(std::ceil(needed))));
  }
  return stats::sorted_quantile(null.samples, 1.0 - alpha);
}

ThresholdResult apply_threshold(const ComponentSet& b, double tau, double alpha) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument("apply_threshold: tau must be finite and nonnegative");
  }
  ThresholdResult result;
  result.alpha = alpha;
  result.tau = tau;
  result.supports = b.patterns().array().abs() > tau;
  return result;
}

ThresholdResult threshold_components(const ComponentSet& b, const NullModel& null, double alpha) {
  ThresholdResult result = apply_threshold(b, threshold_for_pvalue(null, alpha), alpha);
  result.method = null.kind;
  result.n_directions = null.n_directions;
  result.seed = null.seed;
  return result;
}

}  // namespace sica
