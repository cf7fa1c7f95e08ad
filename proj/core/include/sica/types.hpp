#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include <Eigen/Dense>

namespace sica {

// Voxel maps are stored one per row, flattened row-major from (height, width).
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Seed = std::uint64_t;

struct Grid {
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t size() const { return height * width; }
  std::size_t index(std::size_t row, std::size_t col) const { return row * width + col; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

}  // namespace sica
