#ifndef MMEAN_SUBSPACE_HPP
#define MMEAN_SUBSPACE_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "mmean/errors.hpp"

namespace mmean {

/// A k-dimensional linear subspace of R^n, stored as an orthonormal frame
/// (columns of an n x k matrix).
struct Subspace {
  Eigen::MatrixXd frame;

  int ambient_dim() const { return static_cast<int>(frame.rows()); }
  int dim() const { return static_cast<int>(frame.cols()); }
};

// Relative rank cutoff for make_subspace.
inline constexpr double kRankTolerance = 1e-8;

// Eigenvalues of an averaged projection closer than this to 1/2 make the
// spectral rounding ill-conditioned.
inline constexpr double kSpectralGapThreshold = 0.05;

/// Orthonormalizes spanning columns into a Subspace. Throws RankDeficient when
/// the columns fail the relative rank test.
Subspace make_subspace(const Eigen::MatrixXd& columns);

/// Orthogonal projection frame * frame^T onto the subspace.
Eigen::MatrixXd projection_matrix(const Subspace& f);

/// Canonical angles between two same-dimension subspaces, sorted descending,
/// each in [0, pi/2]. Angles below pi/4 are recomputed from sines of
/// (I - P_F) * frame2 to keep full accuracy near zero.
Eigen::VectorXd canonical_angles(const Subspace& f, const Subspace& f2);

/// Largest canonical angle; satisfies |P_F - P_F2|_op = sin(distance).
double finsler_distance(const Subspace& f, const Subspace& f2);

/// The graph {x + u(x) : x in F} where u maps F to its orthogonal complement.
/// u is (n-k) x k, expressed in the frames of F and complement(F).
/// finsler_distance(F, graph) = atan of the largest singular value of u.
Subspace graph_subspace(const Subspace& f, const Eigen::MatrixXd& u);

/// Orthogonal complement. Throws FullSpace when k = n.
Subspace complement(const Subspace& f);

struct WeightedSubspace {
  double weight;
  Subspace space;
};

struct AverageReport {
  Subspace result;
  double spectral_gap;          // distance of nearest eigenvalue of P-bar to 1/2
  double max_member_distance;   // max finsler_distance(member, result), radians
};

/// Averages subspaces by averaging their projections and rounding the result
/// to the nearest rank-k projection: eigenvectors of the weighted projection
/// average with eigenvalue above 1/2 span the result. Members must share
/// dimensions; weights must be positive and sum to 1 within 1e-12.
AverageReport average_subspaces(const std::vector<WeightedSubspace>& members);

/// Finite-difference check of the averaging derivative bound: returns
/// (lhs, rhs) where lhs is the FD speed of the averaged subspace at mu0 and
/// rhs is 8 times the largest FD member speed.
std::pair<double, double> average_derivative_check(
    const std::function<std::vector<WeightedSubspace>(double)>& family, double mu0,
    double fd_step = 1e-5);

}  // namespace mmean

#endif
