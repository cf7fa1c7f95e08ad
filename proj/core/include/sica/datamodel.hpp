#pragma once

#include <map>
#include <optional>
#include <string>

#include "sica/types.hpp"

namespace sica {

/// Observed signal, one time point per row and one voxel per column.
class Dataset {
 public:
  Dataset(Matrix data, std::optional<Grid> grid = std::nullopt,
          std::map<std::string, std::string> meta = {});

  const Matrix& data() const { return data_; }
  const std::optional<Grid>& grid() const { return grid_; }
  const std::map<std::string, std::string>& meta() const { return meta_; }

  std::size_t n_time() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t n_voxels() const { return static_cast<std::size_t>(data_.cols()); }

 private:
  Matrix data_;
  std::optional<Grid> grid_;
  std::map<std::string, std::string> meta_;
};

/// Spatial patterns (components x voxels), optionally with their temporal
/// loadings. When constructed with whitened = true the row statistics are
/// recomputed and checked: zero mean, unit sample variance, uncorrelated.
class ComponentSet {
 public:
  static constexpr double kMeanTolerance = 1e-8;
  static constexpr double kVarianceTolerance = 1e-6;
  static constexpr double kCorrelationTolerance = 1e-6;

  ComponentSet(Matrix patterns, bool whitened, std::optional<Matrix> loadings = std::nullopt,
               std::optional<Grid> grid = std::nullopt);

  const Matrix& patterns() const { return patterns_; }
  const std::optional<Matrix>& loadings() const { return loadings_; }
  const std::optional<Grid>& grid() const { return grid_; }
  bool whitened() const { return whitened_; }

  std::size_t n_components() const { return static_cast<std::size_t>(patterns_.rows()); }
  std::size_t n_voxels() const { return static_cast<std::size_t>(patterns_.cols()); }

 private:
  Matrix patterns_;
  std::optional<Matrix> loadings_;
  std::optional<Grid> grid_;
  bool whitened_;
};

/// Square orthogonal matrix mapping unmixed sources to whitened components.
class MixingMatrix {
 public:
  static constexpr double kOrthogonalityTolerance = 1e-6;

  explicit MixingMatrix(Matrix m);

  const Matrix& matrix() const { return m_; }
  std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }

  /// Frobenius norm of m^T m - I.
  double orthogonality_error() const;

 private:
  Matrix m_;
};

enum class NullKind { empirical, gaussian };

std::string to_string(NullKind kind);
NullKind null_kind_from_string(const std::string& name);

/// Binary supports from thresholding |patterns| at tau.
struct ThresholdResult {
  double alpha = 0.0;
  double tau = 0.0;
  Mask supports;
  NullKind method = NullKind::gaussian;
  std::size_t n_directions = 0;
  Seed seed = 0;

  std::size_t n_selected() const { return static_cast<std::size_t>(supports.count()); }
};

/// Row means, sample variances (n-1) and the largest absolute off-diagonal
/// correlation of a pattern matrix.
struct RowStatistics {
  Vector mean;
  Vector variance;
  double max_abs_correlation = 0.0;
};

RowStatistics row_statistics(const Matrix& patterns);

bool all_finite(const Matrix& m);

}  // namespace sica
