#pragma once

#include <filesystem>
#include <string>

#include "sica/types.hpp"

namespace sica::test {

/// Standard-normal matrix from a seeded generator.
Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Seed seed);

/// Rows centered, decorrelated and scaled to unit sample variance
/// (symmetric whitening), so the result passes the ComponentSet check.
Matrix whiten_rows(const Matrix& m);

/// Largest principal angle (radians) between the row spaces of a and b.
double max_principal_angle(const Matrix& a, const Matrix& b);

/// Fresh empty directory under the system temp path.
std::filesystem::path temp_dir(const std::string& name);

bool bitwise_equal(const Matrix& a, const Matrix& b);

}  // namespace sica::test
