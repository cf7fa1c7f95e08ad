#include "sica/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "sica/errors.hpp"

namespace sica::stats {

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 64) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

double mean(std::span<const double> x) {
  if (x.empty()) throw InvalidArgument("mean of an empty sample");
  return pairwise_sum(x) / double(x.size());
}

namespace {

struct CentralMoments {
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
};

CentralMoments central_moments(std::span<const double> x) {
  const double mu = mean(x);
  CentralMoments m;
  for (double v : x) {
    const double d = v - mu;
    const double d2 = d * d;
    m.m2 += d2;
    m.m3 += d2 * d;
    m.m4 += d2 * d2;
  }
  const double n = double(x.size());
  m.m2 /= n;
  m.m3 /= n;
  m.m4 /= n;
  return m;
}

}  // namespace

double variance(std::span<const double> x) {
  if (x.size() < 2) throw InvalidArgument("variance needs at least two values");
  const double mu = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return ss / double(x.size() - 1);
}

double skewness(std::span<const double> x) {
  const CentralMoments m = central_moments(x);
  if (m.m2 <= 0.0) return 0.0;
  return m.m3 / std::pow(m.m2, 1.5);
}

double kurtosis(std::span<const double> x) {
  const CentralMoments m = central_moments(x);
  if (m.m2 <= 0.0) throw DegenerateDataError("kurtosis of a constant sample");
  return m.m4 / (m.m2 * m.m2);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("normal_quantile needs p in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidArgument("quantile of an empty sample");
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  const double pos = q * double(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - double(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

void standardize(std::span<double> x) {
  const double mu = mean(x);
  for (double& v : x) v -= mu;
  const double sd = std::sqrt(variance(x));
  if (!(sd > 0.0)) throw DegenerateDataError("cannot standardize a constant sample");
  for (double& v : x) v /= sd;
}

}  // namespace sica::stats
