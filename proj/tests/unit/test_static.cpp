#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "turnpike/model_zoo.hpp"
#include "turnpike/static_turnpike.hpp"

using turnpike::Matrix;
using turnpike::Vector;

TEST_CASE("static: homogeneous data gives the zero triple") {
  const auto prob = turnpike::double_integrator_circle();
  const auto s = turnpike::solve_static(prob.A, prob.B, prob.C, prob.Q,
                                        Vector::Zero(2), Vector::Zero(1));
  CHECK(s.y_s.norm() == 0.0);
  CHECK(s.u_s.norm() == 0.0);
  CHECK(s.lambda_s.norm() == 0.0);
}

TEST_CASE("static: scalar closed form") {
  Matrix A(1, 1), B(1, 1), C(1, 1), Q(1, 1);
  A << -1;
  B << 1;
  C << 1;
  Q << 1;
  Vector y_d(1), u_d(1);
  y_d << 1;
  u_d << 0;
  const auto s = turnpike::solve_static(A, B, C, Q, y_d, u_d);
  CHECK(s.y_s(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.lambda_s(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.u_s(0) == doctest::Approx(0.5).epsilon(1e-12));
  // The two defining relations, checked directly.
  CHECK(std::abs(-s.y_s(0) + s.u_s(0)) <= 1e-14);
  CHECK(std::abs(s.y_s(0) + s.lambda_s(0) - 1.0) <= 1e-14);
  CHECK(s.residual_norm <= 1e-9 * (1.0 + y_d.norm() + u_d.norm()));
}

TEST_CASE("static: double integrator resting on the target is free") {
  const auto prob = turnpike::double_integrator_circle();
  Vector y_d(2), u_d(1);
  y_d << 1, 0;
  u_d << 0;
  const auto s = turnpike::solve_static(prob.A, prob.B, prob.C, prob.Q, y_d,
                                        u_d);
  CHECK(std::abs(s.y_s(0) - 1.0) <= 1e-12);
  CHECK(std::abs(s.y_s(1)) <= 1e-12);
  CHECK(s.lambda_s.norm() <= 1e-12);
  CHECK(s.u_s.norm() <= 1e-12);
}

TEST_CASE("static: equilibrium property on random instances") {
  std::mt19937_64 rng(8675309u);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    const int m = 1 + static_cast<int>(rng() % 2);
    const int p = 1 + static_cast<int>(rng() % 2);
    const auto inst = oracle::random_stabilizable_detectable(n, m, p, rng);
    const Matrix Q = Matrix::Identity(m, m);
    Vector y_d(n), u_d(m);
    for (int i = 0; i < n; ++i) y_d(i) = unif(rng);
    for (int i = 0; i < m; ++i) u_d(i) = unif(rng);

    const auto s = turnpike::solve_static(inst.A, inst.B, inst.C, Q, y_d, u_d);
    const double tol = 1e-9 * (1.0 + y_d.norm() + u_d.norm());
    const Matrix H = inst.C.transpose() * inst.C;
    CHECK((inst.A * s.y_s + inst.B * s.u_s).norm() <= tol);
    CHECK((H * (s.y_s - y_d) - inst.A.transpose() * s.lambda_s).norm() <= tol);
    CHECK((s.u_s - u_d - Q.inverse() * inst.B.transpose() * s.lambda_s)
              .norm() <= tol);
    CHECK(s.residual_norm <= tol);
  }
}

TEST_CASE("static: singular steady system is reported") {
  Matrix A = Matrix::Zero(1, 1), B = Matrix::Zero(1, 1),
         C = Matrix::Zero(1, 1), Q = Matrix::Identity(1, 1);
  CHECK_THROWS_AS(
      turnpike::solve_static(A, B, C, Q, Vector::Ones(1), Vector::Zero(1)),
      turnpike::SingularSystem);
}

TEST_CASE("static: dimension checks") {
  const auto prob = turnpike::double_integrator_circle();
  CHECK_THROWS_AS(turnpike::solve_static(prob.A, prob.B, prob.C, prob.Q,
                                         Vector::Zero(3), Vector::Zero(1)),
                  turnpike::DimensionMismatch);
  CHECK_THROWS_AS(turnpike::solve_static(prob.A, prob.B, prob.C, prob.Q,
                                         Vector::Zero(2), Vector::Zero(2)),
                  turnpike::DimensionMismatch);
}
