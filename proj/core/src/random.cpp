#include "sica/random.hpp"

namespace sica {

Matrix random_orthogonal(Eigen::Index n, Seed seed) {
  Rng rng(seed);
  const Eigen::MatrixXd g = standard_normal(n, n, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace sica
