#include "sica/fastica.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sica/errors.hpp"
#include "sica/random.hpp"
#include "sica/stats.hpp"

namespace sica {

namespace {

// E[log cosh(nu)] and E[nu^4 / 4] for nu ~ N(0, 1).
constexpr double kGaussianLogcosh = 0.374567207491437974;
constexpr double kGaussianQuarticQuarter = 0.75;

Matrix symmetric_decorrelation(const Matrix& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w * w.transpose());
  const Vector inv_sqrt = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose() * w;
}

struct Attempt {
  Matrix w;
  int iterations = 0;
  bool converged = false;
  double contrast_initial = 0.0;
};

Attempt run_fixed_point(const Matrix& x, const IcaOptions& options, Seed seed) {
  const Eigen::Index k = x.rows();
  const double n = double(x.cols());
  Attempt a;
  a.w = random_orthogonal(k, seed);
  a.contrast_initial = mean_contrast(a.w * x, options.contrast);

  Matrix g(k, x.cols());
  Vector g_prime(k);
  for (int it = 1; it <= options.max_iter; ++it) {
    const Matrix y = a.w * x;
    if (options.contrast == Contrast::logcosh) {
      // tanh(y) = 1 - 2 / (exp(2y) + 1); the vectorized exp is much cheaper
      // than the scalar tanh here.
      g = (1.0 - 2.0 / ((2.0 * y.array().min(40.0).max(-40.0)).exp() + 1.0)).matrix();
      g_prime = (1.0 - g.array().square()).rowwise().mean().matrix();
    } else {
      g = y.array().cube().matrix();
      g_prime = (3.0 * y.array().square()).rowwise().mean().matrix();
    }
    Matrix w_new = g * x.transpose() / n - g_prime.asDiagonal() * a.w;
    w_new = symmetric_decorrelation(w_new);

    const double lim = (1.0 - (w_new * a.w.transpose()).diagonal().array().abs()).abs().maxCoeff();
    a.w = std::move(w_new);
    a.iterations = it;
    if (lim < options.tol) {
      a.converged = true;
      break;
    }
  }
  return a;
}

}  // namespace

std::string to_string(Contrast contrast) { return contrast == Contrast::cube ? "cube" : "logcosh"; }

Contrast contrast_from_string(const std::string& name) {
  if (name == "logcosh") return Contrast::logcosh;
  if (name == "cube") return Contrast::cube;
  throw InvalidArgument("unknown contrast '" + name + "' (expected logcosh or cube)");
}

double contrast_value(std::span<const double> y, Contrast contrast) {
  double acc = 0.0;
  if (contrast == Contrast::logcosh) {
    for (double v : y) {
      const double a = std::abs(v);
      // log cosh(a) = a + log1p(exp(-2a)) - log 2, stable for large a.
      acc += a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
    }
    const double d = acc / double(y.size()) - kGaussianLogcosh;
    return d * d;
  }
  for (double v : y) acc += v * v * v * v / 4.0;
  const double d = acc / double(y.size()) - kGaussianQuarticQuarter;
  return d * d;
}

double mean_contrast(const Matrix& rows, Contrast contrast) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) total += contrast_value(stats::row_span(rows, i), contrast);
  return total / double(rows.rows());
}

IcaFit fastica(const ComponentSet& c, const IcaOptions& options) {
  if (!c.whitened()) throw InvalidArgument("fastica: input components must be whitened");
  if (options.max_iter <= 0) throw InvalidArgument("fastica: max_iter must be positive");
  if (!(options.tol > 0.0)) throw InvalidArgument("fastica: tol must be positive");
  if (options.max_restarts < 0) throw InvalidArgument("fastica: max_restarts must be nonnegative");

  const Matrix& x = c.patterns();
  const Eigen::Index k = x.rows();

  Attempt best;
  int restarts = 0;
  for (int attempt = 0; attempt <= options.max_restarts; ++attempt) {
    const Seed seed = attempt == 0 ? options.seed : derive_seed(options.seed, std::uint64_t(attempt));
    best = run_fixed_point(x, options, seed);
    restarts = attempt;
    if (best.converged) break;
  }

  // Canonical form: nonnegative skewness, rows by descending excess kurtosis.
  Matrix w = best.w;
  Matrix y = w * x;
  std::vector<double> kurt(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    if (stats::skewness(stats::row_span(y, i)) < 0.0) {
      w.row(i) *= -1.0;
      y.row(i) *= -1.0;
    }
    kurt[static_cast<std::size_t>(i)] = stats::kurtosis(stats::row_span(y, i)) - 3.0;
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return kurt[static_cast<std::size_t>(a)] > kurt[static_cast<std::size_t>(b)];
  });
  Matrix w_sorted(k, k);
  for (Eigen::Index i = 0; i < k; ++i) w_sorted.row(i) = w.row(order[static_cast<std::size_t>(i)]);

  Matrix sources = w_sorted * x;
  const double contrast_final = mean_contrast(sources, options.contrast);
  Matrix mixing = w_sorted.transpose();

  return IcaFit{ComponentSet(std::move(sources), true, std::nullopt, c.grid()),
                MixingMatrix(std::move(mixing)),
                std::move(w_sorted),
                best.iterations,
                best.converged,
                restarts,
                best.contrast_initial,
                contrast_final};
}

double amari_index(const Matrix& p) {
  if (p.rows() != p.cols() || p.rows() == 0) throw InvalidArgument("amari_index needs a square matrix");
  const Eigen::Index n = p.rows();
  if (n == 1) return 0.0;
  const Eigen::ArrayXXd a = p.cwiseAbs().array();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = a.row(i).maxCoeff();
    if (m > 0.0) total += a.row(i).sum() / m - 1.0;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const double m = a.col(j).maxCoeff();
    if (m > 0.0) total += a.col(j).sum() / m - 1.0;
  }
  return total / (2.0 * double(n) * double(n - 1));
}

}  // namespace sica
