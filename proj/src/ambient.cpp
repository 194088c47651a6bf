#include "mmean/ambient.hpp"

#include <cmath>
#include <limits>

namespace mmean {

namespace {
double clamp_unit(double x) { return std::min(1.0, std::max(-1.0, x)); }
}

AmbientSpace AmbientSpace::euclidean(int dim) {
  if (dim < 2) raise(ErrorCode::ValidationError, "ambient dimension must be >= 2");
  AmbientSpace m;
  m.kind_ = AmbientKind::Euclidean;
  m.dim_ = dim;
  return m;
}

AmbientSpace AmbientSpace::sphere(int dim, double radius) {
  if (dim < 2) raise(ErrorCode::ValidationError, "ambient dimension must be >= 2");
  if (!(radius > 0.0)) raise(ErrorCode::ValidationError, "sphere radius must be positive");
  AmbientSpace m;
  m.kind_ = AmbientKind::Sphere;
  m.dim_ = dim;
  m.radius_ = radius;
  return m;
}

double AmbientSpace::injectivity_radius() const {
  return is_sphere() ? M_PI * radius_ : std::numeric_limits<double>::infinity();
}

bool AmbientSpace::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != embedding_dim()) return false;
  if (!is_sphere()) return true;
  return std::abs(x.norm() - radius_) <= tol * (1.0 + radius_);
}

Eigen::VectorXd AmbientSpace::project_point(Eigen::VectorXd x) const {
  if (is_sphere()) x *= radius_ / x.norm();
  return x;
}

Eigen::VectorXd AmbientSpace::tangent_project(const Eigen::VectorXd& x, Eigen::VectorXd v) const {
  if (is_sphere()) {
    Eigen::VectorXd unit = x / x.norm();
    v -= unit.dot(v) * unit;
  }
  return v;
}

Eigen::MatrixXd AmbientSpace::tangent_basis(const Eigen::VectorXd& x) const {
  const int m = embedding_dim();
  if (!is_sphere()) return Eigen::MatrixXd::Identity(m, m);
  // Complete x/|x| to an orthonormal basis; the remaining columns span T_x.
  Eigen::MatrixXd radial = x / x.norm();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(radial, Eigen::ComputeFullU);
  return svd.matrixU().rightCols(m - 1);
}

Eigen::VectorXd AmbientSpace::exp_map(const Eigen::VectorXd& x, const Eigen::VectorXd& v) const {
  if (!is_sphere()) return x + v;
  const double norm_v = v.norm();
  if (norm_v >= M_PI * radius_) {
    raise(ErrorCode::BeyondInjectivity, "tangent vector reaches the antipode");
  }
  if (norm_v == 0.0) return x;
  const double theta = norm_v / radius_;
  return project_point(std::cos(theta) * x + (radius_ * std::sin(theta) / norm_v) * v);
}

Eigen::VectorXd AmbientSpace::log_map(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  if (!is_sphere()) return y - x;
  const double r2 = radius_ * radius_;
  const double c = clamp_unit(x.dot(y) / r2);
  const double dist = radius_ * std::acos(c);
  Eigen::VectorXd w = y - (x.dot(y) / r2) * x;  // component of y tangent at x
  const double norm_w = w.norm();
  if (norm_w < 1e-14 * radius_) {
    if (c < 0.0) raise(ErrorCode::BeyondInjectivity, "log of an antipodal point");
    return Eigen::VectorXd::Zero(x.size());
  }
  return (dist / norm_w) * w;
}

Eigen::VectorXd AmbientSpace::parallel_transport(const Eigen::VectorXd& x,
                                                 const Eigen::VectorXd& y,
                                                 const Eigen::VectorXd& v) const {
  if (!is_sphere()) return v;
  Eigen::VectorXd u = log_map(x, y);
  const double dist = u.norm();
  if (dist < 1e-14 * radius_) return v;
  Eigen::VectorXd e_x = u / dist;                       // geodesic direction at x
  Eigen::VectorXd back = log_map(y, x);
  Eigen::VectorXd e_y = -back / back.norm();            // same geodesic, direction at y
  // The component along the geodesic rotates onto e_y; the rest of T_x is
  // orthogonal to the geodesic 2-plane and is fixed.
  const double along = e_x.dot(v);
  Eigen::VectorXd rest = v - along * e_x;
  return along * e_y + tangent_project(y, rest);
}

double AmbientSpace::distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  if (!is_sphere()) return (x - y).norm();
  return radius_ * std::acos(clamp_unit(x.dot(y) / (radius_ * radius_)));
}

double AmbientSpace::dist_sq_hessian_orth(double rho) const {
  if (!is_sphere() || rho == 0.0) return 1.0;
  const double t = rho / radius_;
  return t * std::cos(t) / std::sin(t);
}

}  // namespace mmean
