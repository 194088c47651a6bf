#include "mmean/subspace.hpp"

#include <algorithm>
#include <cmath>

namespace mmean {

namespace {

double clamp_unit(double x) { return std::min(1.0, std::max(-1.0, x)); }

// Modified Gram-Schmidt. Keeps already-orthonormal inputs unchanged, which
// matters for frames coming back out of eigendecompositions.
Eigen::MatrixXd orthonormalize(Eigen::MatrixXd a) {
  for (int j = 0; j < a.cols(); ++j) {
    for (int i = 0; i < j; ++i) {
      a.col(j) -= a.col(i).dot(a.col(j)) * a.col(i);
    }
    double norm = a.col(j).norm();
    if (norm == 0.0) raise(ErrorCode::RankDeficient, "zero column during orthonormalization");
    a.col(j) /= norm;
  }
  return a;
}

void check_same_shape(const Subspace& f, const Subspace& f2) {
  if (f.ambient_dim() != f2.ambient_dim() || f.dim() != f2.dim()) {
    raise(ErrorCode::DimensionMismatch,
          "subspaces have shapes " + std::to_string(f.ambient_dim()) + "x" +
              std::to_string(f.dim()) + " and " + std::to_string(f2.ambient_dim()) + "x" +
              std::to_string(f2.dim()));
  }
}

}  // namespace

Subspace make_subspace(const Eigen::MatrixXd& columns) {
  const int n = static_cast<int>(columns.rows());
  const int k = static_cast<int>(columns.cols());
  if (k < 1 || k > n) {
    raise(ErrorCode::DimensionMismatch,
          "need 1 <= k <= n, got n=" + std::to_string(n) + " k=" + std::to_string(k));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(columns);
  const auto& sv = svd.singularValues();
  if (sv(k - 1) <= kRankTolerance * sv(0)) {
    raise(ErrorCode::RankDeficient, "columns are rank deficient (sigma_min/sigma_max = " +
                                        std::to_string(sv(k - 1) / sv(0)) + ")");
  }
  return Subspace{orthonormalize(columns)};
}

Eigen::MatrixXd projection_matrix(const Subspace& f) { return f.frame * f.frame.transpose(); }

Eigen::VectorXd canonical_angles(const Subspace& f, const Subspace& f2) {
  check_same_shape(f, f2);
  const int k = f.dim();

  // Cosines: singular values of F^T F2, descending in Eigen.
  Eigen::JacobiSVD<Eigen::MatrixXd> cos_svd(f.frame.transpose() * f2.frame);
  Eigen::VectorXd cosines = cos_svd.singularValues();

  // Sines: singular values of (I - P_F) F2, also descending.
  Eigen::MatrixXd residual = f2.frame - f.frame * (f.frame.transpose() * f2.frame);
  Eigen::JacobiSVD<Eigen::MatrixXd> sin_svd(residual);
  Eigen::VectorXd sines = sin_svd.singularValues();

  // Angles descending: pair the j-th largest sine with the j-th smallest cosine.
  Eigen::VectorXd angles(k);
  for (int j = 0; j < k; ++j) {
    double from_cos = std::acos(clamp_unit(cosines(k - 1 - j)));
    angles(j) = from_cos < M_PI / 4 ? std::asin(clamp_unit(sines(j))) : from_cos;
  }
  return angles;
}

double finsler_distance(const Subspace& f, const Subspace& f2) {
  return canonical_angles(f, f2)(0);
}

Subspace graph_subspace(const Subspace& f, const Eigen::MatrixXd& u) {
  const int k = f.dim();
  if (static_cast<int>(u.cols()) != k) {
    raise(ErrorCode::DimensionMismatch, "graph map must have k columns");
  }
  if (u.rows() == 0) return f;  // full space: the only map to {0} is zero
  if (u.rows() != f.ambient_dim() - k) {
    raise(ErrorCode::DimensionMismatch, "graph map must have n-k rows");
  }
  Subspace perp = complement(f);
  return make_subspace(f.frame + perp.frame * u);
}

Subspace complement(const Subspace& f) {
  const int n = f.ambient_dim();
  const int k = f.dim();
  if (k == n) raise(ErrorCode::FullSpace, "full space has no orthogonal complement");
  // Full SVD of the frame: the trailing left singular vectors span the complement.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(f.frame, Eigen::ComputeFullU);
  return Subspace{svd.matrixU().rightCols(n - k)};
}

AverageReport average_subspaces(const std::vector<WeightedSubspace>& members) {
  if (members.empty()) raise(ErrorCode::WeightError, "need at least one member");
  const int n = members.front().space.ambient_dim();
  const int k = members.front().space.dim();

  double weight_sum = 0.0;
  for (const auto& m : members) {
    if (m.space.ambient_dim() != n || m.space.dim() != k) {
      raise(ErrorCode::DimensionMismatch, "members must share ambient and subspace dimensions");
    }
    if (m.weight <= 0.0) raise(ErrorCode::WeightError, "weights must be positive");
    weight_sum += m.weight;
  }
  if (std::abs(weight_sum - 1.0) > 1e-12) {
    raise(ErrorCode::WeightError, "weights sum to " + std::to_string(weight_sum) + ", expected 1");
  }

  Eigen::MatrixXd p_bar = Eigen::MatrixXd::Zero(n, n);
  for (const auto& m : members) p_bar += m.weight * projection_matrix(m.space);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p_bar);
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending

  double gap = std::numeric_limits<double>::infinity();
  int above_half = 0;
  for (int i = 0; i < n; ++i) {
    gap = std::min(gap, std::abs(lambda(i) - 0.5));
    if (lambda(i) > 0.5) ++above_half;
  }
  if (gap < kSpectralGapThreshold) {
    raise(ErrorCode::SpectralGapTooSmall,
          "eigenvalue within " + std::to_string(gap) + " of 1/2; members too spread out");
  }
  if (above_half != k) {
    raise(ErrorCode::SpectralGapTooSmall,
          "spectral rounding would change rank (" + std::to_string(above_half) +
              " eigenvalues above 1/2, expected " + std::to_string(k) + ")");
  }

  AverageReport report;
  report.result = Subspace{orthonormalize(eig.eigenvectors().rightCols(k))};
  report.spectral_gap = gap;
  report.max_member_distance = 0.0;
  for (const auto& m : members) {
    report.max_member_distance =
        std::max(report.max_member_distance, finsler_distance(m.space, report.result));
  }
  return report;
}

std::pair<double, double> average_derivative_check(
    const std::function<std::vector<WeightedSubspace>(double)>& family, double mu0,
    double fd_step) {
  std::vector<WeightedSubspace> at0 = family(mu0);
  std::vector<WeightedSubspace> at1 = family(mu0 + fd_step);
  if (at0.size() != at1.size()) {
    raise(ErrorCode::DimensionMismatch, "family changed member count across mu");
  }

  Subspace avg0 = average_subspaces(at0).result;
  Subspace avg1 = average_subspaces(at1).result;
  double lhs = finsler_distance(avg0, avg1) / fd_step;

  double sup_member = 0.0;
  for (std::size_t i = 0; i < at0.size(); ++i) {
    sup_member = std::max(sup_member, finsler_distance(at0[i].space, at1[i].space) / fd_step);
  }
  return {lhs, 8.0 * sup_member};
}

}  // namespace mmean
