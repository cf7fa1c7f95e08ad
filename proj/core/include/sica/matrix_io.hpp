#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "sica/types.hpp"

namespace sica {

// SICA1 layout: an ASCII line "SICA1 <rows> <cols>\n" followed by rows*cols
// IEEE-754 binary64 values, row-major, little-endian.
inline constexpr const char* kMatrixMagic = "SICA1";

void write_matrix(const Matrix& m, const std::filesystem::path& path);
Matrix read_matrix(const std::filesystem::path& path);

/// Masks are stored as SICA1 matrices holding 0.0 / 1.0.
void write_mask(const Mask& mask, const std::filesystem::path& path);
Mask read_mask(const std::filesystem::path& path);

/// Contents of the `<path>.json` sidecar written next to a matrix.
struct MatrixSidecar {
  Seed seed = 0;
  std::string created_by;
  std::optional<Grid> grid;
};

std::filesystem::path sidecar_path(const std::filesystem::path& matrix_path);
void write_sidecar(const std::filesystem::path& matrix_path, const MatrixSidecar& sidecar);
std::optional<MatrixSidecar> read_sidecar(const std::filesystem::path& matrix_path);

}  // namespace sica
