#pragma once

#include <cstddef>

#include "sica/datamodel.hpp"

namespace sica {

/// Truncated-SVD estimate of the signal subspace, y_c ~= loadings * patterns.
///
/// Each time point (row of y) is centered over voxels before the SVD, so the
/// patterns are zero-mean maps. Patterns are scaled to unit sample variance
/// and each row is sign-flipped so its largest-magnitude entry is positive.
struct PcaFit {
  ComponentSet components;  // whitened = true
  Matrix loadings;          // n_time x n_components
  Vector singular_values;   // full spectrum of the centered input, descending
  double residual_variance = 0.0;
  Vector time_means;        // spatial mean removed from each time point
  Matrix whitening;         // n_components x n_time, patterns = whitening * centered

  std::size_t n_components() const { return components.n_components(); }
};

/// Numerical rank used by fit_pca: singular values above
/// max(n_time, n_voxels) * eps * s_max.
std::size_t numerical_rank(const Vector& singular_values, std::size_t rows, std::size_t cols);

PcaFit fit_pca(const Dataset& y, std::size_t n_components);

}  // namespace sica
