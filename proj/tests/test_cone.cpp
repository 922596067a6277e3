#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tcmv/cone.hpp"

using namespace tcmv;

TEST_CASE("no-shorting projection is componentwise clipping") {
  const ConeConstraint cone = ConeConstraint::no_shorting(3);
  Eigen::VectorXd u(3);
  u << 1.0, -2.0, 0.5;
  const Eigen::VectorXd p = cone.project(u);
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(0.0));
  CHECK(p[2] == doctest::Approx(0.5));
  CHECK(cone.contains(p));
  CHECK_FALSE(cone.contains(u));
}

TEST_CASE("single halfspace projection matches the closed form") {
  Eigen::MatrixXd A(1, 2);
  A << 1.0, 2.0;
  const ConeConstraint cone = ConeConstraint::from_rows(A);
  Eigen::VectorXd u(2);
  u << -1.0, -1.0;  // A u = -3 < 0
  const Eigen::VectorXd p = cone.project(u);
  const Eigen::VectorXd want =
      u - (A.row(0).dot(u) / A.row(0).squaredNorm()) * A.row(0).transpose();
  CHECK((p - want).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(cone.contains(p));
}

TEST_CASE("projection onto an oblique two-halfspace cone is feasible and closest") {
  Eigen::MatrixXd A(2, 2);
  A << 1.0, 0.2,
      -0.3, 1.0;
  const ConeConstraint cone = ConeConstraint::from_rows(A);
  Eigen::VectorXd u(2);
  u << -2.0, -1.5;
  const Eigen::VectorXd p = cone.project(u);
  CHECK(cone.contains(p));
  // Dykstra converges to the Euclidean projection: no feasible point on a
  // coarse polar grid may be closer.
  const double dist = (p - u).norm();
  for (int k = 0; k < 360; ++k) {
    const double ang = k * 3.14159265358979 / 180.0;
    for (const double r : {0.5, 1.0, 2.0, 3.0}) {
      Eigen::VectorXd cand(2);
      cand << r * std::cos(ang), r * std::sin(ang);
      if (cone.contains(cand)) CHECK((cand - u).norm() >= dist - 1e-6);
    }
  }
}

TEST_CASE("projection reports non-convergence instead of looping") {
  Eigen::MatrixXd A(2, 2);
  A << 1.0, 0.0,
      -1.0, 1e-9;  // nearly opposing halfspaces
  const ConeConstraint cone = ConeConstraint::from_rows(A);
  Eigen::VectorXd u(2);
  u << 5.0, -7.0;
  CHECK_THROWS_AS(cone.project(u, 1e-10, 2), std::runtime_error);
}

TEST_CASE("lineality space of the no-shorting cone is the origin") {
  const ConeConstraint cone = ConeConstraint::no_shorting(3);
  Eigen::VectorXd u(3);
  u << 0.3, -0.7, 2.0;
  const Eigen::VectorXd p = cone.project_lineality(u);
  CHECK(p.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("lineality space of a halfspace is its boundary hyperplane") {
  Eigen::MatrixXd A(1, 3);
  A << 1.0, 1.0, 1.0;
  const ConeConstraint cone = ConeConstraint::from_rows(A);
  Eigen::VectorXd u(3);
  u << 1.0, 2.0, 3.0;
  const Eigen::VectorXd p = cone.project_lineality(u);
  CHECK(std::abs(A.row(0).dot(p)) < 1e-12);               // on the hyperplane
  CHECK((cone.project_lineality(p) - p).norm() < 1e-12);  // idempotent
  // Both p and -p are admissible cone directions.
  CHECK(cone.contains(p));
  CHECK(cone.contains((-p).eval()));
}

TEST_CASE("unconstrained cone accepts and returns everything") {
  const ConeConstraint cone = ConeConstraint::from_rows(Eigen::MatrixXd(0, 3), "none");
  CHECK(cone.unconstrained());
  Eigen::VectorXd u(3);
  u << -1.0, 2.0, -3.0;
  CHECK(cone.contains(u));
  CHECK((cone.project(u) - u).norm() == 0.0);
  CHECK((cone.project_lineality(u) - u).norm() == 0.0);
}
