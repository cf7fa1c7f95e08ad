#include "sica/whiten.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sica/errors.hpp"

namespace sica {

std::size_t numerical_rank(const Vector& singular_values, std::size_t rows, std::size_t cols) {
  if (singular_values.size() == 0 || !(singular_values(0) > 0.0)) return 0;
  const double eps = std::numeric_limits<double>::epsilon();
  const double tol = singular_values(0) * std::max(1e-10, double(std::max(rows, cols)) * eps);
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values(i) > tol) ++rank;
  }
  return rank;
}

PcaFit fit_pca(const Dataset& y, std::size_t n_components) {
  const std::size_t n_time = y.n_time();
  const std::size_t n_voxels = y.n_voxels();
  if (n_components == 0) throw InvalidArgument("fit_pca: n_components must be positive");
  const std::size_t upper = std::min(n_time, n_voxels);
  if (n_components > upper) {
    throw RankError("fit_pca: " + std::to_string(n_components) + " components requested but the data is " +
                        std::to_string(n_time) + "x" + std::to_string(n_voxels) +
                        " (achievable rank at most " + std::to_string(upper) + ")",
                    upper);
  }

  Vector time_means = y.data().rowwise().mean();
  const Eigen::MatrixXd centered = (y.data().colwise() - time_means);
  if (centered.norm() == 0.0) throw DegenerateDataError("fit_pca: input is constant over voxels");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector s = svd.singularValues();
  const std::size_t rank = numerical_rank(s, n_time, n_voxels);
  if (rank == 0) throw DegenerateDataError("fit_pca: input has no variance");
  if (n_components > rank) {
    throw RankError("fit_pca: " + std::to_string(n_components) +
                        " components requested but the achievable rank is " + std::to_string(rank),
                    rank);
  }

  const auto k = static_cast<Eigen::Index>(n_components);
  const double scale = std::sqrt(double(n_voxels) - 1.0);
  const Vector s_k = s.head(k);

  Matrix patterns = scale * svd.matrixV().leftCols(k).transpose();
  Matrix loadings = svd.matrixU().leftCols(k) * s_k.asDiagonal() / scale;
  Matrix whitening = scale * s_k.cwiseInverse().asDiagonal() * svd.matrixU().leftCols(k).transpose();

  for (Eigen::Index i = 0; i < k; ++i) {
    Eigen::Index arg = 0;
    patterns.row(i).cwiseAbs().maxCoeff(&arg);
    if (patterns(i, arg) < 0.0) {
      patterns.row(i) *= -1.0;
      loadings.col(i) *= -1.0;
      whitening.row(i) *= -1.0;
    }
  }

  const double residual_variance =
      (centered - loadings * patterns).squaredNorm() / (double(n_time) * double(n_voxels));

  ComponentSet components(std::move(patterns), true, loadings, y.grid());
  return PcaFit{std::move(components), std::move(loadings), s, residual_variance, std::move(time_means),
                std::move(whitening)};
}

}  // namespace sica
