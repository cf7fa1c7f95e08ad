#pragma once

#include "sica/fastica.hpp"
#include "sica/isonull.hpp"
#include "sica/whiten.hpp"

namespace sica {

/// PCA whitening followed by FastICA.
struct Decomposition {
  PcaFit pca;
  IcaFit ica;

  /// n_components x n_time matrix taking the centered input to the sources.
  Matrix total_unmixing() const { return ica.unmixing * pca.whitening; }
};

Decomposition decompose(const Dataset& y, std::size_t n_components, const IcaOptions& ica = {});

struct PipelineOptions {
  std::size_t n_components = 0;  // 0 means one component per input row
  IcaOptions ica;
  NullKind null_kind = NullKind::gaussian;
  std::size_t n_directions = kDefaultDirections;
  Seed null_seed = 0;
};

NullModel build_null(const ComponentSet& sources, const PipelineOptions& options);

}  // namespace sica
