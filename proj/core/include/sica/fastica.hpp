#pragma once

#include <span>

#include "sica/datamodel.hpp"

namespace sica {

enum class Contrast { logcosh, cube };

std::string to_string(Contrast contrast);
Contrast contrast_from_string(const std::string& name);

struct IcaOptions {
  Contrast contrast = Contrast::logcosh;
  int max_iter = 400;
  double tol = 1e-4;
  Seed seed = 0;
  int max_restarts = 3;
};

/// Symmetric FastICA result. `mixing * sources.patterns()` reconstructs the
/// whitened input; `unmixing` is mixing^T.
struct IcaFit {
  ComponentSet sources;
  MixingMatrix mixing;
  Matrix unmixing;
  int n_iterations = 0;
  bool converged = false;
  int n_restarts = 0;
  double contrast_initial = 0.0;  // mean contrast at the random start
  double contrast_final = 0.0;
};

/// Negentropy proxy (E[G(y)] - E[G(nu)])^2 for a unit-variance row.
double contrast_value(std::span<const double> y, Contrast contrast);
double mean_contrast(const Matrix& rows, Contrast contrast);

IcaFit fastica(const ComponentSet& c, const IcaOptions& options = {});

/// Amari index of a square matrix, normalized to [0, 1]; zero iff the
/// matrix is a scaled permutation.
double amari_index(const Matrix& p);

}  // namespace sica
