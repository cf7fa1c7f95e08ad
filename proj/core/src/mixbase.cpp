#include "sica/mixbase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "sica/errors.hpp"
#include "sica/stats.hpp"

namespace sica {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMinStd = 1e-12;

double log_normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

// Gamma(shape, scale) log-density at d > 0.
double log_gamma_pdf(double d, double shape, double scale) {
  if (!(d > 0.0)) return kNegInf;
  return (shape - 1.0) * std::log(d) - d / scale - std::lgamma(shape) - shape * std::log(scale);
}

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Weighted Gamma MLE for the shape (Minka's generalized Newton on
// log k - digamma(k) = log mean - mean log).
double fit_gamma_shape(double mean_d, double mean_log_d) {
  const double s = std::log(mean_d) - mean_log_d;
  if (!(s > 1e-12)) return 1e6;  // all mass at one point: very peaked
  double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  for (int it = 0; it < 100; ++it) {
    const double num = mean_log_d - std::log(mean_d) + std::log(k) - boost::math::digamma(k);
    const double den = k * k * (1.0 / k - boost::math::trigamma(k));
    const double inv = 1.0 / k + num / den;
    if (!(inv > 0.0)) break;
    const double next = 1.0 / inv;
    if (std::abs(next - k) <= 1e-12 * k) {
      k = next;
      break;
    }
    k = next;
  }
  return std::clamp(k, 1e-3, 1e6);
}

struct ClassMask {
  bool positive = true;
  bool negative = true;
};

double log_class_density(const MixtureFit& f, int cls, double x) {
  switch (cls) {
    case MixtureFit::kNull:
      return log_normal_pdf(x, f.null_mean, f.null_std);
    case MixtureFit::kPositive:
      return log_gamma_pdf(x - f.pos_shift, f.pos_shape, f.pos_scale);
    default:
      return log_gamma_pdf(f.neg_shift - x, f.neg_shape, f.neg_scale);
  }
}

struct Initial {
  double center = 0.0;
  double spread = 1.0;
};

Initial robust_center(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  Initial init;
  init.center = stats::sorted_quantile(sorted, 0.5);
  std::vector<double> dev(sorted.size());
  std::transform(sorted.begin(), sorted.end(), dev.begin(), [&](double v) { return std::abs(v - init.center); });
  std::sort(dev.begin(), dev.end());
  init.spread = 1.482602218505602 * stats::sorted_quantile(dev, 0.5);
  if (!(init.spread > 0.0)) {
    // Heavy ties at the median; fall back to the 5-95% trimmed spread.
    const double lo = stats::sorted_quantile(sorted, 0.05);
    const double hi = stats::sorted_quantile(sorted, 0.95);
    init.spread = (hi - lo) / (2.0 * 1.6448536269514722);
  }
  return init;
}

void init_gamma(std::span<const double> values, double shift, bool positive, double& shape, double& scale,
                double& weight) {
  double s1 = 0.0, s2 = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    const double d = positive ? v - shift : shift - v;
    if (d > 0.0) {
      s1 += d;
      s2 += d * d;
      ++n;
    }
  }
  if (n < 2) {
    weight = 0.0;
    return;
  }
  const double m = s1 / double(n);
  const double var = std::max(s2 / double(n) - m * m, 1e-12);
  shape = std::clamp(m * m / var, 1e-3, 1e6);
  scale = var / m;
  weight = double(n) / double(values.size());
}

MixtureFit run_em(std::span<const double> values, const MixtureOptions& options, const Initial& init,
                  ClassMask active) {
  const std::size_t n = values.size();
  MixtureFit f;
  f.seed = options.seed;
  f.null_mean = init.center;
  f.null_std = init.spread;
  f.pos_shift = init.center + options.tail_offset * init.spread;
  f.neg_shift = init.center - options.tail_offset * init.spread;
  f.positive_removed = !active.positive;
  f.negative_removed = !active.negative;

  double w_pos = 0.0, w_neg = 0.0;
  if (active.positive) init_gamma(values, f.pos_shift, true, f.pos_shape, f.pos_scale, w_pos);
  if (active.negative) init_gamma(values, f.neg_shift, false, f.neg_shape, f.neg_scale, w_neg);
  if (active.positive && w_pos == 0.0) f.positive_removed = true;
  if (active.negative && w_neg == 0.0) f.negative_removed = true;
  f.weights = {1.0 - w_pos - w_neg, w_pos, w_neg};

  std::vector<double> r0(n), r1(n), r2(n);
  double previous = kNegInf;
  for (int it = 0; it < options.max_iter; ++it) {
    // E-step, with the log-likelihood of the current parameters.
    double ll = 0.0;
    const double lw0 = std::log(f.weights[0]);
    const double lw1 = f.weights[1] > 0.0 ? std::log(f.weights[1]) : kNegInf;
    const double lw2 = f.weights[2] > 0.0 ? std::log(f.weights[2]) : kNegInf;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = values[i];
      const double l0 = lw0 + log_class_density(f, MixtureFit::kNull, x);
      const double l1 = lw1 == kNegInf ? kNegInf : lw1 + log_class_density(f, MixtureFit::kPositive, x);
      const double l2 = lw2 == kNegInf ? kNegInf : lw2 + log_class_density(f, MixtureFit::kNegative, x);
      const double total = log_sum_exp(log_sum_exp(l0, l1), l2);
      ll += total;
      r0[i] = std::exp(l0 - total);
      r1[i] = l1 == kNegInf ? 0.0 : std::exp(l1 - total);
      r2[i] = l2 == kNegInf ? 0.0 : std::exp(l2 - total);
    }
    f.log_likelihood = ll;
    f.log_likelihood_trace.push_back(ll);
    if (previous != kNegInf && std::abs(ll - previous) <= options.tol * std::abs(previous)) {
      f.converged = true;
      break;
    }
    previous = ll;

    // M-step.
    double n0 = 0.0, n1 = 0.0, n2 = 0.0, sx = 0.0;
    double p_d = 0.0, p_ld = 0.0, q_d = 0.0, q_ld = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = values[i];
      n0 += r0[i];
      sx += r0[i] * x;
      if (r1[i] > 0.0) {
        const double d = x - f.pos_shift;
        n1 += r1[i];
        p_d += r1[i] * d;
        p_ld += r1[i] * std::log(d);
      }
      if (r2[i] > 0.0) {
        const double d = f.neg_shift - x;
        n2 += r2[i];
        q_d += r2[i] * d;
        q_ld += r2[i] * std::log(d);
      }
    }
    const double mu = sx / n0;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += r0[i] * (values[i] - mu) * (values[i] - mu);
    f.null_mean = mu;
    f.null_std = std::max(std::sqrt(ss / n0), kMinStd);
    f.weights = {n0 / double(n), n1 / double(n), n2 / double(n)};
    if (n1 > 0.0) {
      f.pos_shape = fit_gamma_shape(p_d / n1, p_ld / n1);
      f.pos_scale = (p_d / n1) / f.pos_shape;
    }
    if (n2 > 0.0) {
      f.neg_shape = fit_gamma_shape(q_d / n2, q_ld / n2);
      f.neg_scale = (q_d / n2) / f.neg_shape;
    }
    f.n_em_iterations = it + 1;

    const bool pos_collapsed = !f.positive_removed && f.weights[1] < kCollapsedWeight;
    const bool neg_collapsed = !f.negative_removed && f.weights[2] < kCollapsedWeight;
    if (pos_collapsed || neg_collapsed) {
      ClassMask next{!(f.positive_removed || pos_collapsed), !(f.negative_removed || neg_collapsed)};
      return run_em(values, options, init, next);
    }
  }
  if (f.positive_removed) f.weights[1] = 0.0;
  if (f.negative_removed) f.weights[2] = 0.0;
  return f;
}

}  // namespace

double MixtureFit::null_density(double x) const {
  return std::exp(log_class_density(*this, kNull, x));
}
double MixtureFit::positive_density(double x) const {
  return positive_removed ? 0.0 : std::exp(log_class_density(*this, kPositive, x));
}
double MixtureFit::negative_density(double x) const {
  return negative_removed ? 0.0 : std::exp(log_class_density(*this, kNegative, x));
}
double MixtureFit::density(double x) const {
  return weights[0] * null_density(x) + weights[1] * positive_density(x) + weights[2] * negative_density(x);
}

double MixtureFit::activation_ratio(double x) const {
  const double l1 = positive_removed || weights[1] <= 0.0
                        ? kNegInf
                        : std::log(weights[1]) + log_class_density(*this, kPositive, x);
  const double l2 = negative_removed || weights[2] <= 0.0
                        ? kNegInf
                        : std::log(weights[2]) + log_class_density(*this, kNegative, x);
  const double act = log_sum_exp(l1, l2);
  if (act == kNegInf) return 0.0;
  const double l0 = std::log(weights[0]) + log_class_density(*this, kNull, x);
  return std::exp(act - l0);
}

MixtureFit fit_mixture(std::span<const double> values, const MixtureOptions& options) {
  if (values.size() < kMinMixtureSamples) {
    throw InvalidArgument("fit_mixture: need at least " + std::to_string(kMinMixtureSamples) + " values, got " +
                          std::to_string(values.size()));
  }
  if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); })) {
    throw InvalidArgument("fit_mixture: values must be finite");
  }
  if (options.max_iter <= 0 || !(options.tol > 0.0)) {
    throw InvalidArgument("fit_mixture: max_iter and tol must be positive");
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) throw DegenerateDataError("fit_mixture: values are constant");

  const Initial init = robust_center(values);
  return run_em(values, options, init, ClassMask{});
}

MixtureFit fit_mixture(std::span<const double> values, int max_iter, double tol, Seed seed) {
  MixtureOptions options;
  options.max_iter = max_iter;
  options.tol = tol;
  options.seed = seed;
  return fit_mixture(values, options);
}

std::vector<bool> threshold_mixture(const MixtureFit& fit, std::span<const double> values, double ratio) {
  std::vector<bool> selected(values.size(), false);
  for (std::size_t i = 0; i < values.size(); ++i) selected[i] = fit.activation_ratio(values[i]) > ratio;
  return selected;
}

std::vector<double> default_ratio_grid(std::size_t n) {
  std::vector<double> grid(n);
  if (n == 1) return {1.0};
  const double a = std::log(kMinSweepRatio), b = std::log(kMaxSweepRatio);
  for (std::size_t i = 0; i < n; ++i) grid[i] = std::exp(a + (b - a) * double(i) / double(n - 1));
  return grid;
}

std::vector<double> clamp_ratios(std::span<const double> ratios) {
  std::vector<double> out;
  out.reserve(ratios.size());
  for (double r : ratios) out.push_back(std::clamp(r, kMinSweepRatio, kMaxSweepRatio));
  return out;
}

bool selection_is_monotone(const MixtureFit& fit, std::span<const double> values, double ratio) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  // Walking outward from the null mean, once selected a value must stay selected.
  const auto mid = std::lower_bound(sorted.begin(), sorted.end(), fit.null_mean);
  bool seen = false;
  for (auto it = mid; it != sorted.end(); ++it) {
    const bool sel = fit.activation_ratio(*it) > ratio;
    if (seen && !sel) return false;
    seen = seen || sel;
  }
  seen = false;
  for (auto it = std::make_reverse_iterator(mid); it != sorted.rend(); ++it) {
    const bool sel = fit.activation_ratio(*it) > ratio;
    if (seen && !sel) return false;
    seen = seen || sel;
  }
  return true;
}

}  // namespace sica
