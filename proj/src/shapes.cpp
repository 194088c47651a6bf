#include "mmean/shapes.hpp"

#include <cmath>

#include "mmean/errors.hpp"

namespace mmean {

Isometry Isometry::identity(int embedding_dim) {
  return {Eigen::MatrixXd::Identity(embedding_dim, embedding_dim),
          Eigen::VectorXd::Zero(embedding_dim)};
}

Isometry Isometry::compose(const Isometry& inner) const {
  return {linear * inner.linear, linear * inner.translation + translation};
}

Isometry Isometry::inverse() const {
  Eigen::MatrixXd at = linear.transpose();
  return {at, -(at * translation)};
}

namespace {

double fourier_eval(double base, const Eigen::VectorXd& c, const Eigen::VectorXd& s, double u,
                    int order) {
  double out = order == 0 ? base : 0.0;
  for (int i = 0; i < c.size() || i < s.size(); ++i) {
    const double m = i + 1.0;
    const double a = i < c.size() ? c(i) : 0.0;
    const double b = i < s.size() ? s(i) : 0.0;
    switch (order) {
      case 0: out += a * std::cos(m * u) + b * std::sin(m * u); break;
      case 1: out += m * (-a * std::sin(m * u) + b * std::cos(m * u)); break;
      default: out += m * m * (-a * std::cos(m * u) - b * std::sin(m * u)); break;
    }
  }
  return out;
}

class CircleKernel : public ShapeKernel {
 public:
  CircleKernel(double radius, Eigen::VectorXd center) : r_(radius), center_(std::move(center)) {}
  std::string name() const override { return "circle"; }
  int param_dim() const override { return 1; }
  DomainAxis axis(int) const override { return {2.0 * M_PI, true}; }
  Eigen::VectorXd embed(const Eigen::VectorXd& u) const override {
    Eigen::VectorXd p = center_;
    p(0) += r_ * std::cos(u(0));
    p(1) += r_ * std::sin(u(0));
    return p;
  }
  Eigen::MatrixXd embed_d1(const Eigen::VectorXd& u) const override {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(center_.size(), 1);
    d(0, 0) = -r_ * std::sin(u(0));
    d(1, 0) = r_ * std::cos(u(0));
    return d;
  }
  Eigen::VectorXd embed_d2(const Eigen::VectorXd& u, int, int) const override {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(center_.size());
    d(0) = -r_ * std::cos(u(0));
    d(1) = -r_ * std::sin(u(0));
    return d;
  }

 private:
  double r_;
  Eigen::VectorXd center_;
};

class EllipseKernel : public ShapeKernel {
 public:
  EllipseKernel(double a, double b, Eigen::VectorXd center)
      : a_(a), b_(b), center_(std::move(center)) {}
  std::string name() const override { return "ellipse"; }
  int param_dim() const override { return 1; }
  DomainAxis axis(int) const override { return {2.0 * M_PI, true}; }
  Eigen::VectorXd embed(const Eigen::VectorXd& u) const override {
    Eigen::VectorXd p = center_;
    p(0) += a_ * std::cos(u(0));
    p(1) += b_ * std::sin(u(0));
    return p;
  }
  Eigen::MatrixXd embed_d1(const Eigen::VectorXd& u) const override {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(center_.size(), 1);
    d(0, 0) = -a_ * std::sin(u(0));
    d(1, 0) = b_ * std::cos(u(0));
    return d;
  }
  Eigen::VectorXd embed_d2(const Eigen::VectorXd& u, int, int) const override {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(center_.size());
    d(0) = -a_ * std::cos(u(0));
    d(1) = -b_ * std::sin(u(0));
    return d;
  }

 private:
  double a_, b_;
  Eigen::VectorXd center_;
};

class FourierCircleKernel : public ShapeKernel {
 public:
  FourierCircleKernel(double radius, Eigen::VectorXd rc, Eigen::VectorXd rs, Eigen::VectorXd vc,
                      Eigen::VectorXd vs, int embed_dim)
      : radius_(radius), rc_(std::move(rc)), rs_(std::move(rs)), vc_(std::move(vc)),
        vs_(std::move(vs)), embed_dim_(embed_dim) {}
  std::string name() const override { return "fourier_circle"; }
  int param_dim() const override { return 1; }
  DomainAxis axis(int) const override { return {2.0 * M_PI, true}; }
  Eigen::VectorXd embed(const Eigen::VectorXd& uu) const override {
    const double u = uu(0);
    const double r = fourier_eval(radius_, rc_, rs_, u, 0);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(embed_dim_);
    p(0) = r * std::cos(u);
    p(1) = r * std::sin(u);
    if (embed_dim_ == 3) p(2) = fourier_eval(0.0, vc_, vs_, u, 0);
    return p;
  }
  Eigen::MatrixXd embed_d1(const Eigen::VectorXd& uu) const override {
    const double u = uu(0);
    const double r = fourier_eval(radius_, rc_, rs_, u, 0);
    const double dr = fourier_eval(0.0, rc_, rs_, u, 1);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(embed_dim_, 1);
    d(0, 0) = dr * std::cos(u) - r * std::sin(u);
    d(1, 0) = dr * std::sin(u) + r * std::cos(u);
    if (embed_dim_ == 3) d(2, 0) = fourier_eval(0.0, vc_, vs_, u, 1);
    return d;
  }
  Eigen::VectorXd embed_d2(const Eigen::VectorXd& uu, int, int) const override {
    const double u = uu(0);
    const double r = fourier_eval(radius_, rc_, rs_, u, 0);
    const double dr = fourier_eval(0.0, rc_, rs_, u, 1);
    const double ddr = fourier_eval(0.0, rc_, rs_, u, 2);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(embed_dim_);
    d(0) = ddr * std::cos(u) - 2.0 * dr * std::sin(u) - r * std::cos(u);
    d(1) = ddr * std::sin(u) + 2.0 * dr * std::cos(u) - r * std::sin(u);
    if (embed_dim_ == 3) d(2) = fourier_eval(0.0, vc_, vs_, u, 2);
    return d;
  }

 private:
  double radius_;
  Eigen::VectorXd rc_, rs_, vc_, vs_;
  int embed_dim_;
};

class TorusKernel : public ShapeKernel {
 public:
  TorusKernel(double major, double minor) : a_(major), b_(minor) {}
  std::string name() const override { return "torus"; }
  int param_dim() const override { return 2; }
  DomainAxis axis(int) const override { return {2.0 * M_PI, true}; }
  Eigen::VectorXd embed(const Eigen::VectorXd& u) const override {
    const double ring = a_ + b_ * std::cos(u(1));
    return Eigen::Vector3d(ring * std::cos(u(0)), ring * std::sin(u(0)), b_ * std::sin(u(1)));
  }
  Eigen::MatrixXd embed_d1(const Eigen::VectorXd& u) const override {
    const double ring = a_ + b_ * std::cos(u(1));
    Eigen::MatrixXd d(3, 2);
    d.col(0) = Eigen::Vector3d(-ring * std::sin(u(0)), ring * std::cos(u(0)), 0.0);
    d.col(1) = Eigen::Vector3d(-b_ * std::sin(u(1)) * std::cos(u(0)),
                               -b_ * std::sin(u(1)) * std::sin(u(0)), b_ * std::cos(u(1)));
    return d;
  }
  Eigen::VectorXd embed_d2(const Eigen::VectorXd& u, int i, int j) const override {
    const double ring = a_ + b_ * std::cos(u(1));
    if (i == 0 && j == 0) {
      return Eigen::Vector3d(-ring * std::cos(u(0)), -ring * std::sin(u(0)), 0.0);
    }
    if (i == 1 && j == 1) {
      return Eigen::Vector3d(-b_ * std::cos(u(1)) * std::cos(u(0)),
                             -b_ * std::cos(u(1)) * std::sin(u(0)), -b_ * std::sin(u(1)));
    }
    return Eigen::Vector3d(b_ * std::sin(u(1)) * std::sin(u(0)),
                           -b_ * std::sin(u(1)) * std::cos(u(0)), 0.0);
  }

 private:
  double a_, b_;
};

class SphereGraphKernel : public ShapeKernel {
 public:
  SphereGraphKernel(double radius, double lat0, Eigen::VectorXd lc, Eigen::VectorXd ls)
      : radius_(radius), lat0_(lat0), lc_(std::move(lc)), ls_(std::move(ls)) {}
  std::string name() const override { return "sphere_graph"; }
  int param_dim() const override { return 1; }
  DomainAxis axis(int) const override { return {2.0 * M_PI, true}; }
  Eigen::VectorXd embed(const Eigen::VectorXd& uu) const override {
    const double u = uu(0);
    const double phi = fourier_eval(lat0_, lc_, ls_, u, 0);
    return radius_ * Eigen::Vector3d(std::cos(phi) * std::cos(u), std::cos(phi) * std::sin(u),
                                     std::sin(phi));
  }
  Eigen::MatrixXd embed_d1(const Eigen::VectorXd& uu) const override {
    const double u = uu(0);
    const double phi = fourier_eval(lat0_, lc_, ls_, u, 0);
    const double dphi = fourier_eval(0.0, lc_, ls_, u, 1);
    Eigen::MatrixXd d(3, 1);
    d(0, 0) = radius_ * (-std::sin(phi) * dphi * std::cos(u) - std::cos(phi) * std::sin(u));
    d(1, 0) = radius_ * (-std::sin(phi) * dphi * std::sin(u) + std::cos(phi) * std::cos(u));
    d(2, 0) = radius_ * std::cos(phi) * dphi;
    return d;
  }
  Eigen::VectorXd embed_d2(const Eigen::VectorXd& uu, int, int) const override {
    const double u = uu(0);
    const double phi = fourier_eval(lat0_, lc_, ls_, u, 0);
    const double dphi = fourier_eval(0.0, lc_, ls_, u, 1);
    const double ddphi = fourier_eval(0.0, lc_, ls_, u, 2);
    Eigen::VectorXd d(3);
    d(0) = radius_ * (-std::cos(phi) * dphi * dphi * std::cos(u) -
                      std::sin(phi) * ddphi * std::cos(u) +
                      2.0 * std::sin(phi) * dphi * std::sin(u) - std::cos(phi) * std::cos(u));
    d(1) = radius_ * (-std::cos(phi) * dphi * dphi * std::sin(u) -
                      std::sin(phi) * ddphi * std::sin(u) -
                      2.0 * std::sin(phi) * dphi * std::cos(u) - std::cos(phi) * std::sin(u));
    d(2) = radius_ * (-std::sin(phi) * dphi * dphi + std::cos(phi) * ddphi);
    return d;
  }

 private:
  double radius_, lat0_;
  Eigen::VectorXd lc_, ls_;
};

class SegmentKernel : public ShapeKernel {
 public:
  SegmentKernel(Eigen::VectorXd p0, Eigen::VectorXd p1)
      : p0_(std::move(p0)), dir_(p1 - p0_) {}
  std::string name() const override { return "segment"; }
  int param_dim() const override { return 1; }
  DomainAxis axis(int) const override { return {1.0, false}; }
  Eigen::VectorXd embed(const Eigen::VectorXd& u) const override { return p0_ + u(0) * dir_; }
  Eigen::MatrixXd embed_d1(const Eigen::VectorXd&) const override { return dir_; }
  Eigen::VectorXd embed_d2(const Eigen::VectorXd&, int, int) const override {
    return Eigen::VectorXd::Zero(p0_.size());
  }

 private:
  Eigen::VectorXd p0_;
  Eigen::MatrixXd dir_;
};

// Closed curve u -> q(u) from per-coordinate trig series; on sphere ambients
// the curve is radially projected onto the sphere, with derivatives of the
// projection carried through exactly.
class TrigCurveKernel : public ShapeKernel {
 public:
  TrigCurveKernel(std::vector<TrigSeries> coords, bool on_sphere, double radius)
      : coords_(std::move(coords)), on_sphere_(on_sphere), radius_(radius) {}
  std::string name() const override { return "interpolated_curve"; }
  int param_dim() const override { return 1; }
  DomainAxis axis(int) const override { return {coords_.front().period(), true}; }

  Eigen::VectorXd embed(const Eigen::VectorXd& uu) const override {
    Eigen::VectorXd q = eval(uu(0), 0);
    if (!on_sphere_) return q;
    return (radius_ / q.norm()) * q;
  }
  Eigen::MatrixXd embed_d1(const Eigen::VectorXd& uu) const override {
    Eigen::VectorXd q = eval(uu(0), 0), dq = eval(uu(0), 1);
    if (!on_sphere_) return dq;
    const double s = q.norm();
    const double ds = q.dot(dq) / s;
    return radius_ * (dq / s - q * (ds / (s * s)));
  }
  Eigen::VectorXd embed_d2(const Eigen::VectorXd& uu, int, int) const override {
    Eigen::VectorXd q = eval(uu(0), 0), dq = eval(uu(0), 1), ddq = eval(uu(0), 2);
    if (!on_sphere_) return ddq;
    const double s = q.norm();
    const double ds = q.dot(dq) / s;
    const double dds = (dq.squaredNorm() + q.dot(ddq)) / s - ds * ds / s;
    return radius_ * (ddq / s - 2.0 * dq * (ds / (s * s)) - q * (dds / (s * s)) +
                      2.0 * q * (ds * ds / (s * s * s)));
  }

 private:
  Eigen::VectorXd eval(double u, int order) const {
    Eigen::VectorXd out(coords_.size());
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      out(i) = order == 0   ? coords_[i].value(u)
               : order == 1 ? coords_[i].derivative(u)
                            : coords_[i].second_derivative(u);
    }
    return out;
  }

  std::vector<TrigSeries> coords_;
  bool on_sphere_;
  double radius_;
};

class TransformedKernel : public ShapeKernel {
 public:
  TransformedKernel(std::shared_ptr<const ShapeKernel> base, Isometry iso)
      : base_(std::move(base)), iso_(std::move(iso)) {}
  std::string name() const override { return base_->name(); }
  int param_dim() const override { return base_->param_dim(); }
  DomainAxis axis(int i) const override { return base_->axis(i); }
  Eigen::VectorXd embed(const Eigen::VectorXd& u) const override {
    return iso_.apply(base_->embed(u));
  }
  Eigen::MatrixXd embed_d1(const Eigen::VectorXd& u) const override {
    return iso_.linear * base_->embed_d1(u);
  }
  Eigen::VectorXd embed_d2(const Eigen::VectorXd& u, int i, int j) const override {
    return iso_.linear * base_->embed_d2(u, i, j);
  }

 private:
  std::shared_ptr<const ShapeKernel> base_;
  Isometry iso_;
};

Eigen::VectorXd center_or_default(const Eigen::VectorXd& center, int dim) {
  if (center.size() == 0) return Eigen::VectorXd::Zero(dim);
  if (center.size() != dim) raise(ErrorCode::ValidationError, "center has wrong dimension");
  return center;
}

void require_euclidean(const AmbientSpace& ambient, const char* shape) {
  if (ambient.is_sphere()) {
    raise(ErrorCode::ValidationError, std::string(shape) + " requires a euclidean ambient");
  }
}

}  // namespace

ParametricSubmanifold::ParametricSubmanifold(const AmbientSpace& ambient,
                                             std::shared_ptr<const ShapeKernel> kernel,
                                             const Eigen::VectorXi& resolution)
    : ambient_(ambient), kernel_(std::move(kernel)), resolution_(resolution) {
  const int d = kernel_->param_dim();
  if (d < 1 || d >= ambient_.dim()) {
    raise(ErrorCode::ValidationError, "parameter dimension must satisfy 1 <= d < ambient dim");
  }
  if (resolution_.size() != d) {
    raise(ErrorCode::ValidationError, "mesh resolution must have one entry per parameter axis");
  }
  for (int a = 0; a < d; ++a) {
    axes_.push_back(kernel_->axis(a));
    if (resolution_(a) < 2) raise(ErrorCode::ValidationError, "mesh resolution must be >= 2");
  }

  Eigen::VectorXi shape = grid_shape();
  int total = 1;
  for (int a = 0; a < d; ++a) total *= shape(a);

  auto params = std::make_shared<std::vector<Eigen::VectorXd>>();
  auto points = std::make_shared<std::vector<Eigen::VectorXd>>();
  params->reserve(total);
  points->reserve(total);
  Eigen::VectorXi idx = Eigen::VectorXi::Zero(d);
  for (int v = 0; v < total; ++v) {
    Eigen::VectorXd u(d);
    for (int a = 0; a < d; ++a) u(a) = idx(a) * axes_[a].length / resolution_(a);
    Eigen::VectorXd p = kernel_->embed(u);
    if (!ambient_.contains(p)) {
      raise(ErrorCode::ValidationError, "shape point leaves the ambient space");
    }
    params->push_back(std::move(u));
    points->push_back(std::move(p));
    for (int a = d - 1; a >= 0; --a) {
      if (++idx(a) < shape(a)) break;
      idx(a) = 0;
    }
  }
  params_ = params;
  points_ = points;

  // Immersion on the mesh: full-rank first derivative at every vertex.
  double scale = 0.0;
  for (const auto& p : *points_) scale = std::max(scale, p.norm());
  for (int v = 0; v < total; ++v) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(kernel_->embed_d1((*params_)[v]));
    if (svd.singularValues()(d - 1) <= 1e-8) {
      raise(ErrorCode::RankDeficient, "embedding is degenerate at a mesh vertex");
    }
  }
  // Distinct vertices map to distinct points.
  const double dist_tol = 1e-9 * (1.0 + scale);
  for (int i = 0; i < total; ++i) {
    for (int j = i + 1; j < total; ++j) {
      if (((*points_)[i] - (*points_)[j]).norm() < dist_tol) {
        raise(ErrorCode::ValidationError, "mesh vertices collide; not an embedding at this mesh");
      }
    }
  }
}

Eigen::VectorXi ParametricSubmanifold::grid_shape() const {
  Eigen::VectorXi shape(param_dim());
  for (int a = 0; a < param_dim(); ++a) {
    shape(a) = axes_[a].periodic ? resolution_(a) : resolution_(a) + 1;
  }
  return shape;
}

Eigen::VectorXd ParametricSubmanifold::embed(const Eigen::VectorXd& u) const {
  return kernel_->embed(u);
}

Eigen::MatrixXd ParametricSubmanifold::embed_d1(const Eigen::VectorXd& u) const {
  return kernel_->embed_d1(u);
}

Eigen::VectorXd ParametricSubmanifold::embed_d2(const Eigen::VectorXd& u, int i, int j) const {
  return kernel_->embed_d2(u, i, j);
}

Eigen::VectorXd ParametricSubmanifold::wrap_param(Eigen::VectorXd u) const {
  for (int a = 0; a < param_dim(); ++a) {
    const double len = axes_[a].length;
    if (axes_[a].periodic) {
      u(a) = std::fmod(u(a), len);
      if (u(a) < 0.0) u(a) += len;
    } else {
      u(a) = std::min(len, std::max(0.0, u(a)));
    }
  }
  return u;
}

double ParametricSubmanifold::param_separation_cells(const Eigen::VectorXd& u1,
                                                     const Eigen::VectorXd& u2) const {
  double out = 0.0;
  for (int a = 0; a < param_dim(); ++a) {
    double diff = std::abs(u1(a) - u2(a));
    if (axes_[a].periodic) diff = std::min(diff, axes_[a].length - diff);
    out = std::max(out, diff / (axes_[a].length / resolution_(a)));
  }
  return out;
}

double ParametricSubmanifold::param_separation_fraction(const Eigen::VectorXd& u1,
                                                        const Eigen::VectorXd& u2) const {
  double out = 0.0;
  for (int a = 0; a < param_dim(); ++a) {
    double diff = std::abs(u1(a) - u2(a));
    if (axes_[a].periodic) diff = std::min(diff, axes_[a].length - diff);
    out = std::max(out, diff / axes_[a].length);
  }
  return out;
}

ParametricSubmanifold make_circle(const AmbientSpace& ambient, double radius,
                                  const Eigen::VectorXd& center, int mesh) {
  require_euclidean(ambient, "circle");
  if (!(radius > 0.0)) raise(ErrorCode::ValidationError, "circle radius must be positive");
  auto kernel =
      std::make_shared<CircleKernel>(radius, center_or_default(center, ambient.dim()));
  return ParametricSubmanifold(ambient, kernel, Eigen::VectorXi::Constant(1, mesh));
}

ParametricSubmanifold make_ellipse(const AmbientSpace& ambient, double a, double b,
                                   const Eigen::VectorXd& center, int mesh) {
  require_euclidean(ambient, "ellipse");
  if (!(a > 0.0) || !(b > 0.0)) raise(ErrorCode::ValidationError, "ellipse axes must be positive");
  auto kernel = std::make_shared<EllipseKernel>(a, b, center_or_default(center, ambient.dim()));
  return ParametricSubmanifold(ambient, kernel, Eigen::VectorXi::Constant(1, mesh));
}

ParametricSubmanifold make_fourier_circle(const AmbientSpace& ambient, double radius,
                                          const Eigen::VectorXd& radial_cos,
                                          const Eigen::VectorXd& radial_sin,
                                          const Eigen::VectorXd& vertical_cos,
                                          const Eigen::VectorXd& vertical_sin, int mesh) {
  require_euclidean(ambient, "fourier_circle");
  if (!(radius > 0.0)) raise(ErrorCode::ValidationError, "radius must be positive");
  if (ambient.dim() == 2 && (vertical_cos.size() > 0 || vertical_sin.size() > 0)) {
    raise(ErrorCode::ValidationError, "vertical perturbation needs a 3d ambient");
  }
  auto kernel = std::make_shared<FourierCircleKernel>(radius, radial_cos, radial_sin,
                                                      vertical_cos, vertical_sin, ambient.dim());
  return ParametricSubmanifold(ambient, kernel, Eigen::VectorXi::Constant(1, mesh));
}

ParametricSubmanifold make_torus(const AmbientSpace& ambient, double major, double minor,
                                 const Eigen::Vector2i& mesh) {
  require_euclidean(ambient, "torus");
  if (ambient.dim() != 3) raise(ErrorCode::ValidationError, "torus requires ambient dimension 3");
  if (!(major > minor) || !(minor > 0.0)) {
    raise(ErrorCode::ValidationError, "torus needs major > minor > 0");
  }
  auto kernel = std::make_shared<TorusKernel>(major, minor);
  return ParametricSubmanifold(ambient, kernel, mesh);
}

ParametricSubmanifold make_sphere_graph(const AmbientSpace& ambient, double latitude,
                                        const Eigen::VectorXd& lat_cos,
                                        const Eigen::VectorXd& lat_sin, int mesh) {
  if (!ambient.is_sphere() || ambient.dim() != 2) {
    raise(ErrorCode::ValidationError, "sphere_graph requires the S^2 ambient");
  }
  auto kernel =
      std::make_shared<SphereGraphKernel>(ambient.radius(), latitude, lat_cos, lat_sin);
  return ParametricSubmanifold(ambient, kernel, Eigen::VectorXi::Constant(1, mesh));
}

ParametricSubmanifold make_segment(const AmbientSpace& ambient, const Eigen::VectorXd& p0,
                                   const Eigen::VectorXd& p1, int mesh) {
  require_euclidean(ambient, "segment");
  if (p0.size() != ambient.dim() || p1.size() != ambient.dim()) {
    raise(ErrorCode::ValidationError, "segment endpoints have wrong dimension");
  }
  auto kernel = std::make_shared<SegmentKernel>(p0, p1);
  return ParametricSubmanifold(ambient, kernel, Eigen::VectorXi::Constant(1, mesh));
}

ParametricSubmanifold make_trig_curve(const AmbientSpace& ambient,
                                      const std::vector<TrigSeries>& coords, int mesh) {
  if (static_cast<int>(coords.size()) != ambient.embedding_dim()) {
    raise(ErrorCode::ValidationError, "need one coordinate series per embedding coordinate");
  }
  auto kernel =
      std::make_shared<TrigCurveKernel>(coords, ambient.is_sphere(), ambient.radius());
  return ParametricSubmanifold(ambient, kernel, Eigen::VectorXi::Constant(1, mesh));
}

ParametricSubmanifold transformed(const ParametricSubmanifold& base, const Isometry& iso) {
  const int m = base.ambient().embedding_dim();
  if (iso.linear.rows() != m || iso.linear.cols() != m || iso.translation.size() != m) {
    raise(ErrorCode::ValidationError, "isometry has wrong dimension");
  }
  if ((iso.linear.transpose() * iso.linear - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() >
      1e-10) {
    raise(ErrorCode::ValidationError, "isometry linear part is not orthogonal");
  }
  if (base.ambient().is_sphere() && iso.translation.cwiseAbs().maxCoeff() > 1e-14) {
    raise(ErrorCode::ValidationError, "sphere isometries must fix the center");
  }
  auto kernel = std::make_shared<TransformedKernel>(base.kernel(), iso);
  return ParametricSubmanifold(base.ambient(), kernel, base.resolution());
}

ParametricSubmanifold interpolate_closed_curve(const AmbientSpace& ambient,
                                               const std::vector<Eigen::VectorXd>& points,
                                               int mesh) {
  if (points.empty()) raise(ErrorCode::ValidationError, "no points to interpolate");
  const int m = ambient.embedding_dim();
  const int n = static_cast<int>(points.size());
  std::vector<TrigSeries> coords;
  coords.reserve(m);
  for (int c = 0; c < m; ++c) {
    Eigen::VectorXd samples(n);
    for (int j = 0; j < n; ++j) samples(j) = points[j](c);
    coords.push_back(TrigSeries::fit(samples, 2.0 * M_PI));
  }
  return make_trig_curve(ambient, coords, mesh);
}

}  // namespace mmean
