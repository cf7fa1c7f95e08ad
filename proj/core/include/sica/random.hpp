#pragma once

#include <cstdint>
#include <random>

#include "sica/types.hpp"

namespace sica {

using Rng = std::mt19937_64;

/// Counter-mode stream derivation: a fixed function of (seed, stream), so
/// sub-computations get independent generators regardless of execution order.
constexpr Seed derive_seed(Seed seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Matrix standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = normal(rng);
  return out;
}

/// Haar-distributed orthogonal matrix: QR of a standard-Gaussian matrix with
/// the signs of R's diagonal folded into Q.
Matrix random_orthogonal(Eigen::Index n, Seed seed);

}  // namespace sica
