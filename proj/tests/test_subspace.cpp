#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mmean/subspace.hpp"
#include "test_util.hpp"

using namespace mmean;
using test::gaussian_matrix;
using test::perturbed_subspace;
using test::projection_gap;
using test::random_orthogonal;
using test::random_subspace;

namespace {

Subspace span_of(std::initializer_list<std::initializer_list<double>> cols) {
  const int n = static_cast<int>(cols.begin()->size());
  Eigen::MatrixXd m(n, cols.size());
  int j = 0;
  for (const auto& col : cols) {
    int i = 0;
    for (double x : col) m(i++, j) = x;
    ++j;
  }
  return make_subspace(m);
}

Subspace plane_rotation(double t) {
  Eigen::MatrixXd col(2, 1);
  col << std::cos(t), std::sin(t);
  return make_subspace(col);
}

}  // namespace

TEST_CASE("make_subspace keeps orthonormal input and normalizes the rest") {
  Subspace identity = span_of({{1, 0}, {0, 1}});
  CHECK((identity.frame - Eigen::MatrixXd::Identity(2, 2)).norm() == doctest::Approx(0.0));

  Subspace scaled = span_of({{2, 0, 0}});
  CHECK(scaled.frame(0, 0) == doctest::Approx(1.0));
  CHECK(scaled.frame.col(0).norm() == doctest::Approx(1.0));

  Eigen::MatrixXd bad(2, 2);
  bad << 1, 1, 0, 1e-12;
  CHECK_THROWS_AS(make_subspace(bad), Error);
  try {
    make_subspace(bad);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
}

TEST_CASE("projection matrices") {
  Eigen::MatrixXd p = projection_matrix(span_of({{1, 0}}));
  CHECK(p(0, 0) == doctest::Approx(1.0));
  CHECK(p(0, 1) == doctest::Approx(0.0));
  CHECK(p(1, 1) == doctest::Approx(0.0));

  Eigen::MatrixXd q = projection_matrix(span_of({{1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}}));
  CHECK(q(0, 0) == doctest::Approx(0.5));
  CHECK(q(0, 1) == doctest::Approx(0.5));

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Subspace f = random_subspace(9, 3, rng);
    Eigen::MatrixXd pf = projection_matrix(f);
    CHECK((pf * pf - pf).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(pf.trace() == doctest::Approx(3.0).epsilon(1e-9));
    CHECK((pf - pf.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("canonical angles") {
  Subspace e1 = span_of({{1, 0}});
  CHECK(canonical_angles(e1, plane_rotation(0.3))(0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(canonical_angles(e1, e1)(0) == doctest::Approx(0.0));

  Subspace f = span_of({{1, 0, 0, 0}, {0, 1, 0, 0}});
  Subspace g = span_of({{1, 0, 0, 0}, {0, 0, 1, 0}});
  Eigen::VectorXd angles = canonical_angles(f, g);
  CHECK(angles(0) == doctest::Approx(M_PI / 2));
  CHECK(angles(1) == doctest::Approx(0.0));

  CHECK_THROWS_AS(canonical_angles(e1, f), Error);
}

TEST_CASE("finsler distance equals arcsin of the projection gap") {
  std::mt19937_64 rng(11);
  CHECK(finsler_distance(span_of({{1, 0}}), span_of({{1, 0}})) == doctest::Approx(0.0));
  CHECK(finsler_distance(span_of({{1, 0}}), plane_rotation(0.4)) == doctest::Approx(0.4));

  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> n_dist(2, 12);
    const int n = n_dist(rng);
    std::uniform_int_distribution<int> k_dist(1, std::min(4, n));
    const int k = k_dist(rng);
    Subspace f = random_subspace(n, k, rng);
    Subspace g = random_subspace(n, k, rng);
    const double d = finsler_distance(f, g);
    CHECK(d >= 0.0);
    CHECK(d <= M_PI / 2 + 1e-12);
    CHECK(std::abs(std::sin(d) - projection_gap(f, g)) < 1e-9);
    CHECK(finsler_distance(g, f) == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("small angles keep full accuracy") {
  std::mt19937_64 rng(13);
  for (double angle : {1e-9, 1e-7, 1e-5, 1e-3}) {
    Subspace f = random_subspace(8, 3, rng);
    Subspace g = perturbed_subspace(f, angle, rng);
    CHECK(finsler_distance(f, g) == doctest::Approx(angle).epsilon(1e-6));
  }
}

TEST_CASE("graph subspace distance is atan of the operator norm") {
  Subspace e1 = span_of({{1, 0}});
  CHECK(finsler_distance(e1, graph_subspace(e1, Eigen::MatrixXd::Zero(1, 1))) ==
        doctest::Approx(0.0));

  Eigen::MatrixXd one(1, 1);
  one << 1.0;
  Subspace diag = graph_subspace(e1, one);
  CHECK(finsler_distance(e1, diag) == doctest::Approx(M_PI / 4).epsilon(1e-12));
  CHECK(std::abs(diag.frame(0, 0)) == doctest::Approx(1 / std::sqrt(2.0)));

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    Subspace f = random_subspace(7, 2, rng);
    Eigen::MatrixXd u = 0.8 * gaussian_matrix(5, 2, rng);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(u);
    CHECK(std::abs(finsler_distance(f, graph_subspace(f, u)) -
                   std::atan(svd.singularValues()(0))) < 1e-9);
  }
}

TEST_CASE("complement and duality") {
  Subspace e1 = span_of({{1, 0, 0}});
  Subspace comp = complement(e1);
  CHECK(comp.dim() == 2);
  CHECK(comp.frame.col(0)(0) == doctest::Approx(0.0));
  CHECK(comp.frame.col(1)(0) == doctest::Approx(0.0));

  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    Subspace f = random_subspace(9, 4, rng);
    CHECK(finsler_distance(complement(complement(f)), f) < 1e-9);
    Subspace g = random_subspace(9, 4, rng);
    CHECK(std::abs(finsler_distance(f, g) - finsler_distance(complement(f), complement(g))) <
          1e-9);
  }

  Subspace full = span_of({{1, 0}, {0, 1}});
  CHECK_THROWS_AS(complement(full), Error);
}

TEST_CASE("triangle inequality on random triples") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    Subspace a = random_subspace(8, 3, rng);
    Subspace b = random_subspace(8, 3, rng);
    Subspace c = random_subspace(8, 3, rng);
    CHECK(finsler_distance(a, c) <=
          finsler_distance(a, b) + finsler_distance(b, c) + 1e-9);
  }
}

TEST_CASE("distances ignore rescaling of the input columns") {
  std::mt19937_64 rng(27);
  Eigen::MatrixXd a = gaussian_matrix(6, 2, rng);
  Eigen::MatrixXd b = gaussian_matrix(6, 2, rng);
  const double d = finsler_distance(make_subspace(a), make_subspace(b));
  CHECK(finsler_distance(make_subspace(3.7 * a), make_subspace(0.02 * b)) ==
        doctest::Approx(d).epsilon(1e-12));
}

TEST_CASE("average of a single member is that member") {
  std::mt19937_64 rng(29);
  Subspace f = random_subspace(6, 2, rng);
  AverageReport report = average_subspaces({{1.0, f}});
  CHECK(finsler_distance(report.result, f) < 1e-12);
  CHECK(report.spectral_gap == doctest::Approx(0.5));
  CHECK(report.max_member_distance < 1e-12);
}

TEST_CASE("average of a symmetric pair is the bisector") {
  const double t = 0.2;
  Subspace f = span_of({{1, 0}});
  AverageReport report = average_subspaces({{0.5, f}, {0.5, plane_rotation(t)}});
  CHECK(finsler_distance(report.result, plane_rotation(t / 2)) < 1e-12);
}

TEST_CASE("orthogonal lines cannot be averaged") {
  Subspace f = span_of({{1, 0}});
  Subspace g = span_of({{0, 1}});
  CHECK_THROWS_AS(average_subspaces({{0.5, f}, {0.5, g}}), Error);
  try {
    average_subspaces({{0.5, f}, {0.5, g}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SpectralGapTooSmall);
  }
}

TEST_CASE("weight validation") {
  std::mt19937_64 rng(31);
  Subspace f = random_subspace(5, 2, rng);
  CHECK_THROWS_AS(average_subspaces({}), Error);
  CHECK_THROWS_AS(average_subspaces({{0.4, f}, {0.4, f}}), Error);
  CHECK_THROWS_AS(average_subspaces({{1.5, f}, {-0.5, f}}), Error);
}

TEST_CASE("averaging bound and equivariance on random families") {
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<int> m_dist(2, 6);
  std::uniform_real_distribution<double> spread(0.02, 0.15);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 7, k = 3;
    Subspace base = random_subspace(n, k, rng);
    std::vector<WeightedSubspace> members;
    const int m = m_dist(rng);
    for (int i = 0; i < m; ++i) {
      members.push_back({1.0 / m, perturbed_subspace(base, spread(rng), rng)});
    }
    double eps = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        eps = std::max(eps, finsler_distance(members[i].space, members[j].space));
      }
    }
    AverageReport report = average_subspaces(members);
    for (const auto& member : members) {
      CHECK(finsler_distance(member.space, report.result) < std::asin(2 * eps) + 1e-12);
    }

    Eigen::MatrixXd g = random_orthogonal(n, rng);
    std::vector<WeightedSubspace> rotated;
    for (const auto& member : members) {
      rotated.push_back({member.weight, Subspace{g * member.space.frame}});
    }
    Subspace lhs = average_subspaces(rotated).result;
    CHECK(finsler_distance(lhs, Subspace{g * report.result.frame}) < 1e-9);
  }
}

TEST_CASE("derivative check: constant and rotating families") {
  Subspace e1 = span_of({{1, 0}});

  auto constant = [&](double) { return std::vector<WeightedSubspace>{{1.0, e1}}; };
  auto [lhs_const, rhs_const] = average_derivative_check(constant, 0.1);
  CHECK(lhs_const == doctest::Approx(0.0));
  CHECK(rhs_const == doctest::Approx(0.0));

  auto rotating = [](double mu) {
    return std::vector<WeightedSubspace>{{1.0, plane_rotation(mu)}};
  };
  auto [lhs_rot, rhs_rot] = average_derivative_check(rotating, 0.2);
  CHECK(lhs_rot == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(lhs_rot <= rhs_rot + 1e-4);

  auto pair = [](double mu) {
    return std::vector<WeightedSubspace>{{0.5, plane_rotation(0.05)},
                                         {0.5, plane_rotation(0.05 + mu)}};
  };
  auto [lhs_pair, rhs_pair] = average_derivative_check(pair, 0.0);
  CHECK(lhs_pair <= rhs_pair + 1e-4);
  CHECK(lhs_pair == doctest::Approx(0.5).epsilon(1e-4));  // equal-weight pair moves half as fast
}
