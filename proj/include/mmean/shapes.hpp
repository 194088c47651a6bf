#ifndef MMEAN_SHAPES_HPP
#define MMEAN_SHAPES_HPP

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "mmean/ambient.hpp"
#include "mmean/trig_series.hpp"

namespace mmean {

/// Ambient isometry x -> A x + b acting on embedding coordinates.
/// Sphere isometries must fix the center (b = 0).
struct Isometry {
  Eigen::MatrixXd linear;
  Eigen::VectorXd translation;

  static Isometry identity(int embedding_dim);
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return linear * x + translation; }
  Isometry compose(const Isometry& inner) const;  // this after inner
  Isometry inverse() const;
};

struct DomainAxis {
  double length;
  bool periodic;
};

/// Analytic parametrization: position plus first and second parameter
/// derivatives in embedding coordinates. Sphere-ambient kernels must map onto
/// the sphere exactly.
class ShapeKernel {
 public:
  virtual ~ShapeKernel() = default;
  virtual std::string name() const = 0;
  virtual int param_dim() const = 0;
  virtual DomainAxis axis(int i) const = 0;
  virtual Eigen::VectorXd embed(const Eigen::VectorXd& u) const = 0;
  virtual Eigen::MatrixXd embed_d1(const Eigen::VectorXd& u) const = 0;
  virtual Eigen::VectorXd embed_d2(const Eigen::VectorXd& u, int i, int j) const = 0;
};

/// A compact parametric submanifold with its sampling mesh. Immutable after
/// construction; cheap to copy (kernel and mesh cache are shared).
class ParametricSubmanifold {
 public:
  ParametricSubmanifold() = default;
  ParametricSubmanifold(const AmbientSpace& ambient, std::shared_ptr<const ShapeKernel> kernel,
                        const Eigen::VectorXi& resolution);

  const AmbientSpace& ambient() const { return ambient_; }
  int param_dim() const { return static_cast<int>(axes_.size()); }
  int codim() const { return ambient_.dim() - param_dim(); }
  const std::vector<DomainAxis>& axes() const { return axes_; }
  const Eigen::VectorXi& resolution() const { return resolution_; }
  std::string shape_name() const { return kernel_->name(); }

  int vertex_count() const { return static_cast<int>(points_->size()); }
  const Eigen::VectorXd& vertex_param(int idx) const { return (*params_)[idx]; }
  const Eigen::VectorXd& vertex_point(int idx) const { return (*points_)[idx]; }
  /// Points per axis in the mesh (resolution, plus one on non-periodic axes).
  Eigen::VectorXi grid_shape() const;

  Eigen::VectorXd embed(const Eigen::VectorXd& u) const;
  Eigen::MatrixXd embed_d1(const Eigen::VectorXd& u) const;
  Eigen::VectorXd embed_d2(const Eigen::VectorXd& u, int i, int j) const;

  /// Wraps periodic axes into [0, L), clamps the rest to [0, L].
  Eigen::VectorXd wrap_param(Eigen::VectorXd u) const;
  /// Wrap-aware |u1-u2| per axis, as a multiple of the mesh cell size (max over axes).
  double param_separation_cells(const Eigen::VectorXd& u1, const Eigen::VectorXd& u2) const;
  /// Wrap-aware |u1-u2| per axis, as a fraction of the axis length (max over axes).
  double param_separation_fraction(const Eigen::VectorXd& u1, const Eigen::VectorXd& u2) const;

  const std::shared_ptr<const ShapeKernel>& kernel() const { return kernel_; }

 private:
  AmbientSpace ambient_;
  std::shared_ptr<const ShapeKernel> kernel_;
  std::vector<DomainAxis> axes_;
  Eigen::VectorXi resolution_;
  std::shared_ptr<const std::vector<Eigen::VectorXd>> params_;
  std::shared_ptr<const std::vector<Eigen::VectorXd>> points_;
};

// Shape catalog. Centers default to the origin; circles and ellipses in R^3
// lie in the z = 0 plane.
ParametricSubmanifold make_circle(const AmbientSpace& ambient, double radius,
                                  const Eigen::VectorXd& center, int mesh);
ParametricSubmanifold make_ellipse(const AmbientSpace& ambient, double a, double b,
                                   const Eigen::VectorXd& center, int mesh);
/// Circle of the given radius with radial Fourier perturbation
/// r(u) = radius + sum_m radial_cos[m-1] cos(mu) + radial_sin[m-1] sin(mu),
/// and in R^3 an out-of-plane offset z(u) built the same way.
ParametricSubmanifold make_fourier_circle(const AmbientSpace& ambient, double radius,
                                          const Eigen::VectorXd& radial_cos,
                                          const Eigen::VectorXd& radial_sin,
                                          const Eigen::VectorXd& vertical_cos,
                                          const Eigen::VectorXd& vertical_sin, int mesh);
ParametricSubmanifold make_torus(const AmbientSpace& ambient, double major, double minor,
                                 const Eigen::Vector2i& mesh);
/// Curve on S^2(R) given as a graph over the equator: latitude
/// phi(u) = latitude + Fourier terms, point = R (cos phi cos u, cos phi sin u, sin phi).
ParametricSubmanifold make_sphere_graph(const AmbientSpace& ambient, double latitude,
                                        const Eigen::VectorXd& lat_cos,
                                        const Eigen::VectorXd& lat_sin, int mesh);
ParametricSubmanifold make_segment(const AmbientSpace& ambient, const Eigen::VectorXd& p0,
                                   const Eigen::VectorXd& p1, int mesh);
/// Closed curve through trig interpolants of each embedding coordinate,
/// period 2*pi. Sphere-ambient curves are renormalized onto the sphere.
ParametricSubmanifold make_trig_curve(const AmbientSpace& ambient,
                                      const std::vector<TrigSeries>& coords, int mesh);
/// The image of a shape under an ambient isometry.
ParametricSubmanifold transformed(const ParametricSubmanifold& base, const Isometry& iso);

/// Curve through the given points at equispaced params (period 2*pi).
ParametricSubmanifold interpolate_closed_curve(const AmbientSpace& ambient,
                                               const std::vector<Eigen::VectorXd>& points,
                                               int mesh);

}  // namespace mmean

#endif
