#pragma once

#include <span>
#include <vector>

#include "sica/types.hpp"

namespace sica::stats {

double mean(std::span<const double> x);
/// Unbiased (n - 1) sample variance.
double variance(std::span<const double> x);
double skewness(std::span<const double> x);
/// Non-excess kurtosis m4 / m2^2 (3 for a Gaussian).
double kurtosis(std::span<const double> x);

/// Pairwise summation; order-insensitive to ~1e-15 relative.
double pairwise_sum(std::span<const double> x);

double normal_cdf(double x);
double normal_quantile(double p);

/// Quantile of an ascending-sorted sample with linear interpolation between
/// order statistics (position q * (n - 1)).
double sorted_quantile(std::span<const double> sorted, double q);

/// Rescale to mean 0, unbiased variance 1, in place. Throws
/// DegenerateDataError on zero variance.
void standardize(std::span<double> x);

inline std::span<const double> row_span(const Matrix& m, Eigen::Index row) {
  return {m.data() + row * m.cols(), static_cast<std::size_t>(m.cols())};
}
inline std::span<double> row_span(Matrix& m, Eigen::Index row) {
  return {m.data() + row * m.cols(), static_cast<std::size_t>(m.cols())};
}

}  // namespace sica::stats
