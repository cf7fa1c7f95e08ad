#include "sica/datamodel.hpp"

#include <cmath>
#include <string>

#include "sica/errors.hpp"

namespace sica {

bool all_finite(const Matrix& m) { return m.allFinite(); }

RowStatistics row_statistics(const Matrix& patterns) {
  const Eigen::Index k = patterns.rows();
  const Eigen::Index n = patterns.cols();
  RowStatistics stats;
  stats.mean = patterns.rowwise().mean();
  Matrix centered = patterns.colwise() - stats.mean;
  Matrix cov = centered * centered.transpose() / double(n - 1);
  stats.variance = cov.diagonal();
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      const double denom = std::sqrt(cov(i, i) * cov(j, j));
      const double r = denom > 0.0 ? cov(i, j) / denom : 0.0;
      stats.max_abs_correlation = std::max(stats.max_abs_correlation, std::abs(r));
    }
  }
  return stats;
}

Dataset::Dataset(Matrix data, std::optional<Grid> grid, std::map<std::string, std::string> meta)
    : data_(std::move(data)), grid_(grid), meta_(std::move(meta)) {
  if (data_.rows() < 2 || data_.cols() < 2) {
    throw InvalidArgument("Dataset needs at least 2 time points and 2 voxels, got " +
                          std::to_string(data_.rows()) + "x" + std::to_string(data_.cols()));
  }
  if (!all_finite(data_)) throw InvalidArgument("Dataset contains non-finite entries");
  if (grid_ && grid_->size() != n_voxels()) {
    throw InvalidArgument("Dataset grid " + std::to_string(grid_->height) + "x" +
                          std::to_string(grid_->width) + " does not match " +
                          std::to_string(n_voxels()) + " voxels");
  }
}

ComponentSet::ComponentSet(Matrix patterns, bool whitened, std::optional<Matrix> loadings,
                           std::optional<Grid> grid)
    : patterns_(std::move(patterns)),
      loadings_(std::move(loadings)),
      grid_(grid),
      whitened_(whitened) {
  if (patterns_.rows() < 1 || patterns_.cols() < 2) {
    throw InvalidArgument("ComponentSet needs at least one component and two voxels");
  }
  if (!all_finite(patterns_)) throw InvalidArgument("ComponentSet patterns contain non-finite entries");
  if (loadings_) {
    if (loadings_->cols() != patterns_.rows()) {
      throw InvalidArgument("ComponentSet loadings have " + std::to_string(loadings_->cols()) +
                            " columns for " + std::to_string(patterns_.rows()) + " components");
    }
    if (!all_finite(*loadings_)) throw InvalidArgument("ComponentSet loadings contain non-finite entries");
  }
  if (grid_ && grid_->size() != n_voxels()) {
    throw InvalidArgument("ComponentSet grid does not match voxel count");
  }
  if (whitened_) {
    const RowStatistics stats = row_statistics(patterns_);
    for (Eigen::Index i = 0; i < patterns_.rows(); ++i) {
      if (std::abs(stats.mean(i)) > kMeanTolerance) {
        throw InvalidArgument("ComponentSet flagged whitened but row " + std::to_string(i) +
                              " has mean " + std::to_string(stats.mean(i)));
      }
      if (std::abs(stats.variance(i) - 1.0) > kVarianceTolerance) {
        throw InvalidArgument("ComponentSet flagged whitened but row " + std::to_string(i) +
                              " has variance " + std::to_string(stats.variance(i)));
      }
    }
    if (stats.max_abs_correlation > kCorrelationTolerance) {
      throw InvalidArgument("ComponentSet flagged whitened but rows are correlated (max |r| = " +
                            std::to_string(stats.max_abs_correlation) + ")");
    }
  }
}

MixingMatrix::MixingMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw InvalidArgument("MixingMatrix must be square and non-empty");
  }
  if (!all_finite(m_)) throw InvalidArgument("MixingMatrix contains non-finite entries");
  const double err = orthogonality_error();
  if (err >= kOrthogonalityTolerance) {
    throw InvalidArgument("MixingMatrix is not orthogonal (||M^T M - I||_F = " + std::to_string(err) + ")");
  }
}

double MixingMatrix::orthogonality_error() const {
  return (m_.transpose() * m_ - Matrix::Identity(m_.rows(), m_.cols())).norm();
}

std::string to_string(NullKind kind) { return kind == NullKind::empirical ? "empirical" : "gaussian"; }

NullKind null_kind_from_string(const std::string& name) {
  if (name == "empirical") return NullKind::empirical;
  if (name == "gaussian") return NullKind::gaussian;
  throw InvalidArgument("unknown null kind '" + name + "' (expected empirical or gaussian)");
}

}  // namespace sica
