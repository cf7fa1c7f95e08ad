#include "sica/pipeline.hpp"

namespace sica {

Decomposition decompose(const Dataset& y, std::size_t n_components, const IcaOptions& ica) {
  PcaFit pca = fit_pca(y, n_components);
  IcaFit fit = fastica(pca.components, ica);
  return Decomposition{std::move(pca), std::move(fit)};
}

NullModel build_null(const ComponentSet& sources, const PipelineOptions& options) {
  if (options.null_kind == NullKind::gaussian) return NullModel::gaussian();
  return sample_null(sources, options.n_directions, options.null_seed);
}

}  // namespace sica
