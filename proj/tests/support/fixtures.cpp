#include "fixtures.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>

#include "sica/random.hpp"

namespace sica::test {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Seed seed) {
  Rng rng(seed);
  return standard_normal(rows, cols, rng);
}

Matrix whiten_rows(const Matrix& m) {
  Matrix c = m.colwise() - m.rowwise().mean();
  const Eigen::MatrixXd cov = c * c.transpose() / double(c.cols() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::MatrixXd inv_sqrt = eig.eigenvectors() *
                                   eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                   eig.eigenvectors().transpose();
  return inv_sqrt * c;
}

double max_principal_angle(const Matrix& a, const Matrix& b) {
  // sin of the largest angle is the spectral norm of the part of b's basis
  // outside a's span; this stays accurate for tiny angles where acos does not.
  Eigen::HouseholderQR<Eigen::MatrixXd> qa(a.transpose()), qb(b.transpose());
  const Eigen::MatrixXd ua = qa.householderQ() * Eigen::MatrixXd::Identity(a.cols(), a.rows());
  const Eigen::MatrixXd ub = qb.householderQ() * Eigen::MatrixXd::Identity(b.cols(), b.rows());
  const Eigen::MatrixXd outside = ub - ua * (ua.transpose() * ub);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(outside);
  return std::asin(std::min(1.0, svd.singularValues()(0)));
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("sica_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * std::size_t(a.size())) == 0;
}

}  // namespace sica::test
