#include <doctest.h>

#include "saol/oblique.hpp"
#include "test_helpers.hpp"

using namespace saol;
using namespace saol::testing;

TEST_CASE("random_oblique rows are unit norm and deterministic") {
  Rng rng(42);
  Matrix o = random_oblique(6, 4, rng);
  for (Eigen::Index i = 0; i < o.rows(); ++i)
    CHECK(std::abs(o.row(i).norm() - 1.0) < 1e-12);

  Rng r1(5), r2(5);
  Matrix a = random_oblique(3, 3, r1), b = random_oblique(3, 3, r2);
  CHECK((a - b).lpNorm<Eigen::Infinity>() == 0.0);

  Rng r3(1);
  Matrix scalar = random_oblique(1, 1, r3);
  CHECK(std::abs(std::abs(scalar(0, 0)) - 1.0) < 1e-15);
}

TEST_CASE("tangent projection closed forms") {
  Matrix omega(1, 2), g(1, 2);
  omega << 1, 0;
  g << 3, 4;
  Matrix t = project_to_tangent(omega, g);
  CHECK(t(0, 0) == doctest::Approx(0.0));
  CHECK(t(0, 1) == doctest::Approx(4.0));

  // radial direction is annihilated
  Rng rng(3);
  Matrix o = random_oblique(4, 3, rng);
  CHECK(project_to_tangent(o, o).lpNorm<Eigen::Infinity>() < 1e-14);

  CHECK_THROWS_AS(project_to_tangent(o, Matrix::Zero(2, 2)), std::invalid_argument);
}

TEST_CASE("tangent projection is idempotent and self-adjoint") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix o = random_oblique(5, 4, rng);
    Matrix g1 = random_matrix(5, 4, rng), g2 = random_matrix(5, 4, rng);
    Matrix p1 = project_to_tangent(o, g1);
    CHECK((project_to_tangent(o, p1) - p1).lpNorm<Eigen::Infinity>() < 1e-10);
    double lhs = (p1.array() * g2.array()).sum();
    double rhs = (g1.array() * project_to_tangent(o, g2).array()).sum();
    CHECK(std::abs(lhs - rhs) < 1e-10);
    // projected rows orthogonal to the point
    for (Eigen::Index i = 0; i < 5; ++i) CHECK(std::abs(p1.row(i).dot(o.row(i))) < 1e-10);
  }
}

TEST_CASE("geodesic step closed forms") {
  Matrix omega(1, 2), h(1, 2);
  omega << 1, 0;
  h << 0, 1;
  Matrix quarter = geodesic_step(omega, h, M_PI / 2);
  CHECK(std::abs(quarter(0, 0)) < 1e-15);
  CHECK(quarter(0, 1) == doctest::Approx(1.0));

  Rng rng(6);
  Matrix o = random_oblique(4, 3, rng);
  Matrix t = project_to_tangent(o, random_matrix(4, 3, rng));
  CHECK((geodesic_step(o, t, 0.0) - o).lpNorm<Eigen::Infinity>() == 0.0);

  // zero direction rows are fixed points
  Matrix zero_dir = Matrix::Zero(4, 3);
  CHECK((geodesic_step(o, zero_dir, 2.0) - o).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("geodesic stays on the manifold for long steps") {
  Rng rng(7);
  Matrix o = random_oblique(5, 4, rng);
  Matrix h = project_to_tangent(o, random_matrix(5, 4, rng));
  for (double t : {0.0, 0.1, 1.0, 10.0}) {
    Matrix stepped = geodesic_step(o, h, t);
    for (Eigen::Index i = 0; i < stepped.rows(); ++i)
      CHECK(std::abs(stepped.row(i).norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("geodesic initial velocity matches the direction") {
  Rng rng(8);
  Matrix o = random_oblique(4, 3, rng);
  Matrix h = project_to_tangent(o, random_matrix(4, 3, rng));
  const double eps = 1e-6;
  Matrix fd = (geodesic_step(o, h, eps) - o) / eps;
  CHECK((fd - h).lpNorm<Eigen::Infinity>() < 1e-5);
}

TEST_CASE("geodesic speed equals the direction norm") {
  Rng rng(9);
  Matrix o = random_oblique(4, 3, rng);
  Matrix h = project_to_tangent(o, random_matrix(4, 3, rng));
  const double t0 = 0.37, eps = 1e-6;
  Matrix vel = (geodesic_step(o, h, t0 + eps) - geodesic_step(o, h, t0 - eps)) / (2 * eps);
  for (Eigen::Index i = 0; i < o.rows(); ++i) {
    double expected = h.row(i).norm();
    if (expected < 1e-12) continue;
    CHECK(std::abs(vel.row(i).norm() - expected) / expected < 1e-5);
  }
}

TEST_CASE("analysis operator composition and application agree") {
  Rng rng(10);
  AnalysisOperator op = AnalysisOperator::random({{4, 3}, {3, 2}}, rng);
  CHECK(op.rows() == 12);
  CHECK(op.cols() == 6);
  CHECK(is_oblique(op.compose(), 1e-10));
  Vector s = random_matrix(6, 1, rng).col(0);
  CHECK((op.apply(s) - op.compose() * s).lpNorm<Eigen::Infinity>() < 1e-12);
}
