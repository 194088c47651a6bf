#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mmean/ambient.hpp"
#include "test_util.hpp"

using namespace mmean;

namespace {

Eigen::Vector3d sphere_point(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

double vertex_angle(const AmbientSpace& s, const Eigen::VectorXd& at, const Eigen::VectorXd& a,
                    const Eigen::VectorXd& b) {
  Eigen::VectorXd u = s.log_map(at, a);
  Eigen::VectorXd v = s.log_map(at, b);
  return std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0));
}

}  // namespace

TEST_CASE("euclidean exp/log/distance") {
  AmbientSpace plane = AmbientSpace::euclidean(2);
  Eigen::Vector2d x(1, 2), v(3, 4);
  CHECK((plane.exp_map(x, v) - Eigen::Vector2d(4, 6)).norm() == doctest::Approx(0.0));
  CHECK((plane.log_map(Eigen::Vector2d(1, 1), Eigen::Vector2d(4, 5)) - Eigen::Vector2d(3, 4))
            .norm() == doctest::Approx(0.0));
  CHECK(plane.distance(Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 4)) == doctest::Approx(5.0));
  CHECK((plane.exp_map(x, Eigen::Vector2d::Zero()) - x).norm() == doctest::Approx(0.0));
  CHECK((plane.parallel_transport(x, Eigen::Vector2d(7, 7), v) - v).norm() ==
        doctest::Approx(0.0));
}

TEST_CASE("sphere exp: quarter great circle from the pole") {
  AmbientSpace s2 = AmbientSpace::sphere(2, 1.0);
  Eigen::Vector3d pole(0, 0, 1);
  Eigen::Vector3d v(M_PI / 2, 0, 0);
  CHECK((s2.exp_map(pole, v) - Eigen::Vector3d(1, 0, 0)).norm() < 1e-14);
  CHECK((s2.exp_map(pole, Eigen::Vector3d::Zero()) - pole).norm() == doctest::Approx(0.0));
  CHECK(s2.distance(pole, Eigen::Vector3d(1, 0, 0)) == doctest::Approx(M_PI / 2));
}

TEST_CASE("sphere beyond-injectivity errors") {
  AmbientSpace s2 = AmbientSpace::sphere(2, 2.0);
  Eigen::Vector3d pole(0, 0, 2);
  CHECK_THROWS_AS(s2.exp_map(pole, Eigen::Vector3d(2 * M_PI + 0.1, 0, 0)), Error);
  CHECK_THROWS_AS(s2.log_map(pole, Eigen::Vector3d(0, 0, -2)), Error);
}

TEST_CASE("sphere log inverts exp on random pairs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> angle(0.0, M_PI);
  AmbientSpace s2 = AmbientSpace::sphere(2, 1.7);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::Vector3d x = 1.7 * sphere_point(angle(rng), 2 * angle(rng)).normalized();
    Eigen::Vector3d y = 1.7 * sphere_point(angle(rng), 2 * angle(rng)).normalized();
    if (s2.distance(x, y) > 0.98 * M_PI * 1.7) continue;
    Eigen::VectorXd v = s2.log_map(x, y);
    CHECK((s2.exp_map(x, v) - y).norm() < 1e-10);
    CHECK(v.norm() == doctest::Approx(s2.distance(x, y)).epsilon(1e-12));
    CHECK(std::abs(v.dot(x)) < 1e-10 * 1.7);
    CHECK((s2.log_map(x, x)).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("parallel transport is a linear isometry") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> angle(0.1, M_PI - 0.1);
  AmbientSpace s2 = AmbientSpace::sphere(2, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::Vector3d x = sphere_point(angle(rng), 2 * angle(rng));
    Eigen::Vector3d y = sphere_point(angle(rng), 2 * angle(rng));
    Eigen::VectorXd v = s2.tangent_project(x, test::gaussian_matrix(3, 1, rng).col(0));
    Eigen::VectorXd w = s2.tangent_project(x, test::gaussian_matrix(3, 1, rng).col(0));
    Eigen::VectorXd tv = s2.parallel_transport(x, y, v);
    Eigen::VectorXd tw = s2.parallel_transport(x, y, w);
    CHECK(tv.norm() == doctest::Approx(v.norm()).epsilon(1e-10));
    CHECK(tv.dot(tw) == doctest::Approx(v.dot(w)).epsilon(1e-8));
    CHECK(std::abs(tv.dot(y)) < 1e-10);
    CHECK((s2.parallel_transport(x, x, v) - v).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("transport carries the geodesic tangent to the geodesic tangent") {
  AmbientSpace s2 = AmbientSpace::sphere(2, 1.0);
  Eigen::Vector3d x = sphere_point(1.1, 0.3);
  Eigen::Vector3d y = sphere_point(0.5, 2.0);
  Eigen::VectorXd u = s2.log_map(x, y);
  Eigen::VectorXd arrived = s2.parallel_transport(x, y, u);
  Eigen::VectorXd expected = -s2.log_map(y, x);
  CHECK((arrived - expected).norm() < 1e-10);
}

TEST_CASE("holonomy around a geodesic triangle matches the spherical excess") {
  AmbientSpace s2 = AmbientSpace::sphere(2, 1.0);

  auto holonomy_vs_excess = [&](const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                const Eigen::Vector3d& c) {
    const double excess = vertex_angle(s2, a, b, c) + vertex_angle(s2, b, c, a) +
                          vertex_angle(s2, c, a, b) - M_PI;
    Eigen::VectorXd v = s2.log_map(a, b).normalized();
    Eigen::VectorXd looped =
        s2.parallel_transport(c, a, s2.parallel_transport(b, c, s2.parallel_transport(a, b, v)));
    const double turn =
        std::acos(std::clamp(v.dot(looped) / (v.norm() * looped.norm()), -1.0, 1.0));
    return std::abs(turn - excess);
  };

  // Octant triangle: area pi/2.
  CHECK(holonomy_vs_excess(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0),
                           Eigen::Vector3d(0, 0, 1)) < 1e-6);
  // A smaller, less symmetric triangle.
  CHECK(holonomy_vs_excess(sphere_point(0.9, 0.1), sphere_point(1.2, 0.8),
                           sphere_point(0.6, 1.1)) < 1e-6);
}
