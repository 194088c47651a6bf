#ifndef MMEAN_AMBIENT_HPP
#define MMEAN_AMBIENT_HPP

#include <Eigen/Dense>

#include "mmean/errors.hpp"

namespace mmean {

enum class AmbientKind { Euclidean, Sphere };

/// Constant-curvature model space with closed-form exp, log, transport and
/// distance. Euclidean points are coordinate vectors in R^n; sphere points
/// are stored extrinsically in R^(n+1) with |x| = radius.
class AmbientSpace {
 public:
  AmbientSpace() = default;

  static AmbientSpace euclidean(int dim);
  static AmbientSpace sphere(int dim, double radius);

  AmbientKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double radius() const { return radius_; }
  bool is_sphere() const { return kind_ == AmbientKind::Sphere; }

  /// Length of coordinate vectors (dim for Euclidean, dim+1 for Sphere).
  int embedding_dim() const { return is_sphere() ? dim_ + 1 : dim_; }

  /// |sectional curvature| bound: 0 or 1/radius^2 (exact for these models).
  double curvature_bound() const { return is_sphere() ? 1.0 / (radius_ * radius_) : 0.0; }

  /// Injectivity radius at every point: infinity or pi*radius.
  double injectivity_radius() const;

  bool contains(const Eigen::VectorXd& x, double tol = 1e-10) const;

  /// Snaps near-sphere points back onto the sphere (identity for Euclidean).
  Eigen::VectorXd project_point(Eigen::VectorXd x) const;

  /// Orthogonal projection of v into T_x M.
  Eigen::VectorXd tangent_project(const Eigen::VectorXd& x, Eigen::VectorXd v) const;

  /// Orthonormal basis of T_x M as columns (embedding_dim x dim).
  Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& x) const;

  Eigen::VectorXd exp_map(const Eigen::VectorXd& x, const Eigen::VectorXd& v) const;
  Eigen::VectorXd log_map(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  Eigen::VectorXd parallel_transport(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                     const Eigen::VectorXd& v) const;
  double distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  /// Eigen-structure of the hessian of p -> d(x,p)^2/2 at distance rho from x:
  /// coefficient 1 on the radial direction and `orth` on its tangent complement.
  /// Euclidean: orth = 1. Sphere: orth = (rho/R) cot(rho/R).
  double dist_sq_hessian_orth(double rho) const;

  bool operator==(const AmbientSpace& other) const {
    return kind_ == other.kind_ && dim_ == other.dim_ && radius_ == other.radius_;
  }

 private:
  AmbientKind kind_ = AmbientKind::Euclidean;
  int dim_ = 0;
  double radius_ = 0.0;
};

}  // namespace mmean

#endif
