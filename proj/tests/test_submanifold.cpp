#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mmean/submanifold.hpp"
#include "test_util.hpp"

using namespace mmean;

namespace {

const AmbientSpace kPlane = AmbientSpace::euclidean(2);
const AmbientSpace kSpace = AmbientSpace::euclidean(3);
const AmbientSpace kUnitSphere = AmbientSpace::sphere(2, 1.0);

Eigen::VectorXd vec2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

Eigen::VectorXd vec3(double x, double y, double z) {
  Eigen::VectorXd v(3);
  v << x, y, z;
  return v;
}

Eigen::VectorXd param1(double u) {
  Eigen::VectorXd v(1);
  v << u;
  return v;
}

ParametricSubmanifold unit_circle(int mesh = 128) {
  return make_circle(kPlane, 1.0, Eigen::VectorXd(), mesh);
}

}  // namespace

TEST_CASE("analytic derivatives of every catalog shape agree with finite differences") {
  std::vector<ParametricSubmanifold> shapes;
  shapes.push_back(make_circle(kPlane, 1.3, vec2(0.2, -0.1), 32));
  shapes.push_back(make_ellipse(kPlane, 2.0, 1.0, Eigen::VectorXd(), 32));
  Eigen::VectorXd rc(3), rs(2), vc(1), vs(2);
  rc << 0.02, 0.0, 0.01;
  rs << 0.0, 0.015;
  vc << 0.01;
  vs << 0.0, 0.02;
  shapes.push_back(make_fourier_circle(kSpace, 1.0, rc, rs, vc, vs, 32));
  shapes.push_back(make_torus(kSpace, 2.0, 0.5, Eigen::Vector2i(16, 16)));
  Eigen::VectorXd lc(2), ls(1);
  lc << 0.05, 0.02;
  ls << 0.04;
  shapes.push_back(make_sphere_graph(kUnitSphere, 0.3, lc, ls, 32));
  shapes.push_back(make_segment(kPlane, vec2(0, 0), vec2(3, 1), 16));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  const double h = 1e-6;
  for (const auto& shape : shapes) {
    const int d = shape.param_dim();
    for (int probe = 0; probe < 5; ++probe) {
      Eigen::VectorXd u(d);
      for (int a = 0; a < d; ++a) u(a) = unit(rng) * shape.axes()[a].length;
      Eigen::MatrixXd jac = shape.embed_d1(u);
      for (int a = 0; a < d; ++a) {
        Eigen::VectorXd up = u, dn = u;
        up(a) += h;
        dn(a) -= h;
        Eigen::VectorXd fd = (shape.embed(up) - shape.embed(dn)) / (2 * h);
        CHECK((jac.col(a) - fd).norm() < 1e-7 * (1 + jac.col(a).norm()));
        Eigen::VectorXd fd2 = (shape.embed_d1(up).col(a) - shape.embed_d1(dn).col(a)) / (2 * h);
        CHECK((shape.embed_d2(u, a, a) - fd2).norm() < 1e-6 * (1 + fd2.norm()));
      }
      if (d == 2) {
        Eigen::VectorXd up = u, dn = u;
        up(1) += h;
        dn(1) -= h;
        Eigen::VectorXd fd = (shape.embed_d1(up).col(0) - shape.embed_d1(dn).col(0)) / (2 * h);
        CHECK((shape.embed_d2(u, 0, 1) - fd).norm() < 1e-6 * (1 + fd.norm()));
      }
    }
  }
}

TEST_CASE("tangent and normal spaces of the unit circle") {
  ParametricSubmanifold circle = unit_circle();
  Subspace tangent = tangent_space(circle, param1(0.0));
  Subspace normal = normal_space(circle, param1(0.0));
  CHECK(std::abs(tangent.frame(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(normal.frame(0, 0)) == doctest::Approx(1.0));
  CHECK(tangent.dim() + normal.dim() == 2);
  CHECK(std::abs(tangent.frame.col(0).dot(normal.frame.col(0))) < 1e-12);
}

TEST_CASE("torus normal matches the analytic normal of a surface of revolution") {
  ParametricSubmanifold torus = make_torus(kSpace, 2.0, 0.5, Eigen::Vector2i(24, 24));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
  for (int probe = 0; probe < 20; ++probe) {
    const double u = angle(rng), v = angle(rng);
    Eigen::VectorXd uu(2);
    uu << u, v;
    Eigen::VectorXd analytic =
        vec3(std::cos(v) * std::cos(u), std::cos(v) * std::sin(u), std::sin(v));
    Subspace normal = normal_space(torus, uu);
    Eigen::VectorXd nu = normal.frame.col(0);
    const double sine = (nu - nu.dot(analytic) * analytic).norm();  // sin of the angle
    CHECK(std::asin(std::min(1.0, sine)) < 1e-8);
  }
}

TEST_CASE("nearest point on the unit circle") {
  ParametricSubmanifold circle = unit_circle();
  FootpointResult fp = nearest_point(circle, vec2(2, 0));
  CHECK((fp.foot - vec2(1, 0)).norm() < 1e-12);
  CHECK(fp.rho == doctest::Approx(1.0));

  Eigen::VectorXd on_curve = circle.embed(param1(1.234));
  FootpointResult self = nearest_point(circle, on_curve);
  CHECK(self.rho < 1e-12);
  CHECK((self.foot - on_curve).norm() < 1e-12);

  CHECK_THROWS_AS(nearest_point(circle, vec2(0, 0)), Error);
  try {
    nearest_point(circle, vec2(0, 0));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotUnique);
  }
}

TEST_CASE("nearest point on an ellipse against a dense grid oracle") {
  ParametricSubmanifold ellipse = make_ellipse(kPlane, 2.0, 1.0, Eigen::VectorXd(), 128);
  Eigen::VectorXd x = vec2(0.0, 0.5);

  // Brute force over a million parameter samples.
  double best_u = 0.0, best_d = std::numeric_limits<double>::infinity();
  const int samples = 1000000;
  for (int i = 0; i < samples; ++i) {
    const double u = 2 * M_PI * i / samples;
    const double dx = 2.0 * std::cos(u) - x(0);
    const double dy = std::sin(u) - x(1);
    const double d = dx * dx + dy * dy;
    if (d < best_d) {
      best_d = d;
      best_u = u;
    }
  }

  FootpointResult fp = nearest_point(ellipse, x);
  double err = std::abs(fp.param(0) - best_u);
  err = std::min(err, 2 * M_PI - err);
  CHECK(err < 1e-5);
  CHECK(fp.rho == doctest::Approx(std::sqrt(best_d)).epsilon(1e-9));

  // First-order condition: the geodesic to x leaves the foot orthogonally.
  Eigen::VectorXd to_x = kPlane.log_map(fp.foot, x);
  Eigen::MatrixXd tangent = tangent_space(ellipse, fp.param).frame;
  CHECK(std::abs(to_x.dot(tangent.col(0))) < 1e-8 * fp.rho);
}

TEST_CASE("potential and gradient on the unit circle") {
  ParametricSubmanifold circle = unit_circle();
  CHECK(potential(circle, vec2(2, 0)) == doctest::Approx(0.5));
  Eigen::VectorXd grad = grad_potential(circle, vec2(2, 0));
  CHECK((grad - vec2(1, 0)).norm() < 1e-12);

  Eigen::VectorXd on_curve = circle.embed(param1(0.77));
  CHECK(potential(circle, on_curve) < 1e-20);
  CHECK(grad_potential(circle, on_curve).norm() < 1e-10);
}

TEST_CASE("gradient matches finite differences of the potential at random tube points") {
  ParametricSubmanifold circle = unit_circle();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
  std::uniform_real_distribution<double> radius(0.75, 1.25);
  const double h = 1e-6;
  for (int probe = 0; probe < 100; ++probe) {
    Eigen::VectorXd x = radius(rng) * vec2(std::cos(angle(rng)), std::sin(angle(rng)));
    Eigen::VectorXd grad = grad_potential(circle, x);
    Eigen::VectorXd fd(2);
    for (int i = 0; i < 2; ++i) {
      Eigen::VectorXd up = x, dn = x;
      up(i) += h;
      dn(i) -= h;
      fd(i) = (potential(circle, up) - potential(circle, dn)) / (2 * h);
    }
    CHECK((grad - fd).norm() < 1e-6 * (1 + grad.norm()));
  }
}

TEST_CASE("extended Gauss map") {
  ParametricSubmanifold circle = unit_circle();
  // Euclidean ambient: the vertical space is the normal space at the foot.
  Subspace gauss = gauss_extended(circle, vec2(1.7, 0));
  CHECK(finsler_distance(gauss, normal_space(circle, param1(0.0))) < 1e-12);

  Eigen::VectorXd on_curve = circle.embed(param1(0.4));
  CHECK(finsler_distance(gauss_extended(circle, on_curve),
                         normal_space(circle, param1(0.4))) < 1e-10);

  // Sphere: the transported space contains the radial direction of the geodesic.
  ParametricSubmanifold small_circle =
      make_sphere_graph(kUnitSphere, 0.17, Eigen::VectorXd(), Eigen::VectorXd(), 128);
  Eigen::VectorXd p = small_circle.embed(param1(0.9));
  Eigen::VectorXd nu = normal_space(small_circle, param1(0.9)).frame.col(0);
  Eigen::VectorXd x = kUnitSphere.exp_map(p, 0.2 * nu);
  Subspace vertical = gauss_extended(small_circle, x);
  Eigen::VectorXd radial = kUnitSphere.log_map(x, p).normalized();
  const double cosine = std::abs((vertical.frame.transpose() * radial).norm());
  CHECK(std::acos(std::min(1.0, cosine)) < 1e-9);
}

TEST_CASE("quasi-vertical bundle vs vertical bundle") {
  ParametricSubmanifold circle3 = make_circle(kSpace, 1.0, Eigen::VectorXd(), 128);
  Eigen::VectorXd x = vec3(1.1, 0.02, 0.08);
  CHECK(finsler_distance(quasi_vertical(circle3, x), gauss_extended(circle3, x)) < 1e-9);

  Eigen::VectorXd on_curve = circle3.embed(param1(2.2));
  CHECK(finsler_distance(quasi_vertical(circle3, on_curve),
                         normal_space(circle3, param1(2.2))) < 1e-8);

  // Small circle on S^2 at rho = 0.2: within rho^2/4 of the vertical space.
  ParametricSubmanifold small_circle =
      make_sphere_graph(kUnitSphere, 0.17, Eigen::VectorXd(), Eigen::VectorXd(), 128);
  Eigen::VectorXd p = small_circle.embed(param1(0.3));
  Eigen::VectorXd nu = normal_space(small_circle, param1(0.3)).frame.col(0);
  Eigen::VectorXd probe = kUnitSphere.exp_map(p, 0.2 * nu);
  const double gap =
      finsler_distance(quasi_vertical(small_circle, probe), gauss_extended(small_circle, probe));
  CHECK(gap <= 0.2 * 0.2 / 4 + 1e-4);
}

TEST_CASE("hessian of the circle potential") {
  ParametricSubmanifold circle = unit_circle();
  HessianForm hess = hessian_fd(circle, vec2(1.2, 0));
  CHECK(hess.asymmetry < 1e-8);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess.matrix);
  // Analytic potential (|x| - 1)^2 / 2: eigenvalues r/(1+r) and 1 at distance r.
  CHECK(eig.eigenvalues()(0) == doctest::Approx(0.2 / 1.2).epsilon(1e-6));
  CHECK(eig.eigenvalues()(1) == doctest::Approx(1.0).epsilon(1e-6));

  // Radial direction carries hessian exactly 1.
  Eigen::VectorXd radial = vec2(1, 0);
  CHECK(radial.dot(hess.matrix * radial) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hessian along N is the identity on normals and zero on tangents") {
  ParametricSubmanifold circle = unit_circle();
  Eigen::VectorXd x = circle.embed(param1(0.6));
  HessianForm hess = hessian_fd(circle, x);
  Eigen::VectorXd normal = normal_space(circle, param1(0.6)).frame.col(0);
  Eigen::VectorXd tangent = tangent_space(circle, param1(0.6)).frame.col(0);
  CHECK(normal.dot(hess.matrix * normal) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(tangent.dot(hess.matrix * tangent)) < 1e-6);
  CHECK(std::abs(normal.dot(hess.matrix * tangent)) < 1e-6);
}

TEST_CASE("second fundamental form norms") {
  ParametricSubmanifold segment = make_segment(kPlane, vec2(0, 0), vec2(10, 0), 32);
  CHECK(second_form_norm(segment) < 1e-10);

  for (double radius : {0.5, 1.0, 2.0}) {
    ParametricSubmanifold circle = make_circle(kPlane, radius, Eigen::VectorXd(), 64);
    CHECK(second_form_norm(circle) == doctest::Approx(1.0 / radius).epsilon(1e-6));
  }

  ParametricSubmanifold great_circle =
      make_sphere_graph(kUnitSphere, 0.0, Eigen::VectorXd(), Eigen::VectorXd(), 64);
  CHECK(second_form_norm(great_circle) < 1e-6);

  // Torus: the sharper principal curvature is 1/minor.
  ParametricSubmanifold torus = make_torus(kSpace, 2.0, 0.5, Eigen::Vector2i(24, 24));
  CHECK(second_form_norm(torus) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("gentleness reports") {
  // Unit circle in R^3: true normal injectivity radius is 1.
  ParametricSubmanifold circle3 = make_circle(kSpace, 1.0, Eigen::VectorXd(), 96);
  GentlenessReport unit = gentleness_report(circle3);
  CHECK(unit.injectivity_estimate > 0.8);
  CHECK(unit.injectivity_estimate < 1.2);
  CHECK(unit.curvature_bound == doctest::Approx(0.0));

  // A long straight segment is gentle.
  ParametricSubmanifold segment = make_segment(kPlane, vec2(0, 0), vec2(10, 0), 32);
  GentlenessReport flat = gentleness_report(segment);
  CHECK(flat.gentle);
  CHECK(flat.second_form_norm < 1e-10);

  // Radius 1.3 circle clears the unit-scale thresholds.
  ParametricSubmanifold roomy = make_circle(kSpace, 1.3, Eigen::VectorXd(), 96);
  CHECK(gentleness_report(roomy).gentle);

  // Tightly coiled perturbed circle: curvature scale beats self-distance.
  Eigen::VectorXd coil = Eigen::VectorXd::Zero(24);
  coil(23) = 0.3;  // mode 24, amplitude 0.3
  ParametricSubmanifold spiky = make_fourier_circle(
      kPlane, 1.0, coil, Eigen::VectorXd(), Eigen::VectorXd(), Eigen::VectorXd(), 256);
  GentlenessReport wild = gentleness_report(spiky);
  CHECK_FALSE(wild.gentle);
  CHECK(wild.second_form_norm > 1.5);

  // Great circle on the unit sphere sits exactly at the gentle boundary.
  ParametricSubmanifold great_circle =
      make_sphere_graph(kUnitSphere, 0.0, Eigen::VectorXd(), Eigen::VectorXd(), 96);
  GentlenessReport boundary = gentleness_report(great_circle);
  CHECK(boundary.gentle);
  CHECK(boundary.scale_c == doctest::Approx(1.0));
}

TEST_CASE("retraction does not stretch lengths beyond the Warner factor") {
  for (double r : {0.1, 0.2, 0.25}) {
    ParametricSubmanifold circle3 = make_circle(kSpace, 1.3, Eigen::VectorXd(), 96);
    TubePathLengths lengths = tube_path_lengths(circle3, r, 1.5, 200);
    const double factor = std::cos(r) - 1.5 * std::sin(r);
    CHECK(factor * lengths.retracted_length <= lengths.path_length + 1e-3);
  }
}
