#ifndef MMEAN_TEST_UTIL_HPP
#define MMEAN_TEST_UTIL_HPP

#include <Eigen/Dense>
#include <random>

#include "mmean/subspace.hpp"

namespace mmean::test {

inline Eigen::MatrixXd gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

inline Subspace random_subspace(int n, int k, std::mt19937_64& rng) {
  return make_subspace(gaussian_matrix(n, k, rng));
}

inline Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_matrix(n, n, rng));
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd diag = qr.matrixQR().diagonal();
  for (int i = 0; i < n; ++i) {
    if (diag(i) < 0) q.col(i) = -q.col(i);
  }
  return q;
}

/// Member at distance exactly `angle` from f, in a direction seeded by rng.
inline Subspace perturbed_subspace(const Subspace& f, double angle, std::mt19937_64& rng) {
  if (f.dim() == f.ambient_dim()) return f;
  Eigen::MatrixXd u = gaussian_matrix(f.ambient_dim() - f.dim(), f.dim(), rng);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(u);
  u *= std::tan(angle) / svd.singularValues()(0);
  return graph_subspace(f, u);
}

/// Operator-norm distance between projections, via full SVD of the difference.
inline double projection_gap(const Subspace& f, const Subspace& g) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(projection_matrix(f) - projection_matrix(g));
  return svd.singularValues()(0);
}

}  // namespace mmean::test

#endif
