#include <cmath>
#include <complex>

#include "doctest.h"
#include "support/oracles.hpp"
#include "turnpike/dichotomy.hpp"
#include "turnpike/model_zoo.hpp"
#include "turnpike/periodic.hpp"
#include "turnpike/riccati.hpp"
#include "turnpike/static_turnpike.hpp"

using turnpike::Matrix;
using turnpike::Vector;

namespace {

Matrix di_a_cl() {
  Matrix A_cl(2, 2);
  A_cl << 0.0, 1.0, -1.0, -std::sqrt(3.0);
  return A_cl;
}

double spectral_radius(const Matrix& M) {
  return Eigen::EigenSolver<Matrix>(M, false).eigenvalues().cwiseAbs()
      .maxCoeff();
}

}  // namespace

TEST_CASE("monodromy: closed forms") {
  Matrix A(1, 1);
  A << -1.0;
  CHECK(turnpike::monodromy(A, 1.0)(0, 0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

  CHECK((turnpike::monodromy(Matrix::Zero(2, 2), 1.0) -
         Matrix::Identity(2, 2))
            .norm() == 0.0);

  // Closed-loop double integrator: eigenvalues (-sqrt(3) +/- i)/2, so the
  // period map over one unit of time has spectral radius exp(-sqrt(3)/2).
  const double rho = spectral_radius(turnpike::monodromy(di_a_cl(), 1.0));
  CHECK(rho == doctest::Approx(std::exp(-std::sqrt(3.0) / 2.0)).epsilon(1e-12));
}

TEST_CASE("periodic_z: zero forcing gives the zero orbit") {
  const auto z = turnpike::periodic_z(
      di_a_cl(), [](double) { return Vector::Zero(2); }, 1.0, 64);
  CHECK(z.values.norm() == 0.0);
  CHECK(z.samples() == 64);
  CHECK(z.period == 1.0);
}

TEST_CASE("periodic_z: constant forcing reproduces the algebraic fixed point") {
  Matrix A(1, 1);
  A << -1.0;
  const auto z = turnpike::periodic_z(
      A, [](double) { return Vector::Ones(1); }, 1.0, 32);
  // z' = -z + 1 has the constant periodic orbit z = 1, and the trapezoidal
  // step is exact on constants, so agreement is at solver roundoff.
  for (int k = 0; k <= 32; ++k) {
    CHECK(std::abs(z.values(k, 0) - 1.0) <= 1e-12);
  }
}

TEST_CASE("periodic_z: matches the monolithic collocation oracle") {
  const Matrix A_cl = di_a_cl();
  const auto g = [](double t) {
    Vector v(2);
    v << std::cos(2.0 * M_PI * t), 0.3 * std::sin(2.0 * M_PI * t);
    return v;
  };
  const int N = 48;
  const auto z = turnpike::periodic_z(A_cl, g, 1.0, N);
  const Matrix ref = oracle::periodic_collocation(A_cl, g, 1.0, N);
  CHECK((z.values - ref).lpNorm<Eigen::Infinity>() <= 1e-9);
  // Discrete periodicity is exact by construction.
  CHECK((z.values.row(N) - z.values.row(0)).norm() == 0.0);
}

TEST_CASE("periodic_z: agrees with the exponential-quadrature route at "
          "second order") {
  const Matrix A_cl = di_a_cl();
  const auto g = [](double t) {
    Vector v(2);
    v << std::sin(2.0 * M_PI * t), 0.25 * std::cos(4.0 * M_PI * t);
    return v;
  };
  const Vector z0_a = turnpike::periodic_z(A_cl, g, 1.0, 100).values.row(0);
  const Vector q0_a =
      oracle::periodic_initial_value_quadrature(A_cl, g, 1.0, 100);
  const Vector z0_b = turnpike::periodic_z(A_cl, g, 1.0, 400).values.row(0);
  const Vector q0_b =
      oracle::periodic_initial_value_quadrature(A_cl, g, 1.0, 400);
  const double d_a = (z0_a - q0_a).norm();
  const double d_b = (z0_b - q0_b).norm();
  CHECK(d_a <= 1e-3);
  CHECK(d_b <= d_a / 8.0);  // both routes are second order in the step
}

TEST_CASE("periodic_z: non-invertible period map is reported") {
  // A = 0 has period map I, so I - F^N is singular.
  CHECK_THROWS_AS(
      turnpike::periodic_z(Matrix::Zero(1, 1),
                           [](double) { return Vector::Ones(1); }, 1.0, 32),
      turnpike::SingularMonodromy);
}

TEST_CASE("periodic_z: refuses coarse grids") {
  CHECK_THROWS_AS(
      turnpike::periodic_z(di_a_cl(), [](double) { return Vector::Zero(2); },
                           1.0, 8),
      turnpike::InvalidArgument);
}

TEST_CASE("periodic_q: constant forcing closed form") {
  Matrix A_cl(1, 1);
  A_cl << -1.0;
  // q' = -A_cl^T q + h = q + h has the constant orbit q = -h.
  const auto q = turnpike::periodic_q(
      A_cl, [](double) { return Vector::Constant(1, 0.7); }, 1.0, 32);
  for (int k = 0; k <= 32; ++k) {
    CHECK(std::abs(q.values(k, 0) + 0.7) <= 1e-12);
  }
}

TEST_CASE("periodic_q: matches collocation of the adjoint orbit equation") {
  const Matrix A_cl = di_a_cl();
  const auto h = [](double t) {
    Vector v(2);
    v << std::sin(2.0 * M_PI * t), std::cos(2.0 * M_PI * t) - 0.2;
    return v;
  };
  const int N = 48;
  const auto q = turnpike::periodic_q(A_cl, h, 1.0, N);
  // q' = -A_cl^T q + h is a linear orbit problem with matrix -A_cl^T.
  const Matrix ref =
      oracle::periodic_collocation(Matrix(-A_cl.transpose()), h, 1.0, N);
  CHECK((q.values - ref).lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK((q.values.row(N) - q.values.row(0)).norm() == 0.0);
}

TEST_CASE("periodic signal: evaluation wraps periodically") {
  Matrix A_cl(1, 1);
  A_cl << -2.0;
  const auto z = turnpike::periodic_z(
      A_cl, [](double t) { return Vector::Constant(1, std::sin(2 * M_PI * t)); },
      1.0, 64);
  CHECK(std::abs(z.eval(1.25)(0) - z.eval(0.25)(0)) <= 1e-12);
  CHECK(std::abs(z.eval(-0.75)(0) - z.eval(0.25)(0)) <= 1e-12);
  // Exactly on a node the interpolation returns the stored row.
  CHECK(z.eval(0.5)(0) == doctest::Approx(z.values(32, 0)).epsilon(1e-15));
}

TEST_CASE("synthesize: zero orbits give the reference control") {
  const auto prob = turnpike::double_integrator_circle();
  const auto care = turnpike::solve_care(prob.A, prob.B, prob.C, prob.Q);
  const Matrix G = prob.B * prob.Q.inverse() * prob.B.transpose();
  const auto lyap = turnpike::solve_lyapunov(care.A_cl, G);

  turnpike::PeriodicSignal z, q;
  z.period = q.period = 1.0;
  z.values = Matrix::Zero(33, 2);
  q.values = Matrix::Zero(33, 2);
  const auto u_d = [&prob](double t) { return prob.u_d_at(t); };
  const auto y_d = [&prob](double t) { return prob.y_d_at(t); };
  const auto tp = turnpike::synthesize(z, q, care.P, lyap.E, prob.Q, prob.B,
                                       u_d, prob.A, prob.C, y_d);
  CHECK(tp.y_pi.values.norm() == 0.0);
  CHECK(tp.lambda_pi.values.norm() == 0.0);
  for (int k = 0; k <= 32; ++k) {
    CHECK(std::abs(tp.u_pi.values(k, 0) - prob.u_d_at(k / 32.0)(0)) == 0.0);
  }
}

TEST_CASE("synthesize: grid and period consistency is enforced") {
  const auto prob = turnpike::double_integrator_circle();
  const auto care = turnpike::solve_care(prob.A, prob.B, prob.C, prob.Q);
  const Matrix G = prob.B * prob.Q.inverse() * prob.B.transpose();
  const auto lyap = turnpike::solve_lyapunov(care.A_cl, G);
  const auto u_d = [&prob](double t) { return prob.u_d_at(t); };
  const auto y_d = [&prob](double t) { return prob.y_d_at(t); };

  turnpike::PeriodicSignal z, q;
  z.period = q.period = 1.0;
  z.values = Matrix::Zero(33, 2);
  q.values = Matrix::Zero(65, 2);
  CHECK_THROWS_AS(turnpike::synthesize(z, q, care.P, lyap.E, prob.Q, prob.B,
                                       u_d, prob.A, prob.C, y_d),
                  turnpike::GridMismatch);
  q.values = Matrix::Zero(33, 2);
  q.period = 2.0;
  CHECK_THROWS_AS(turnpike::synthesize(z, q, care.P, lyap.E, prob.Q, prob.B,
                                       u_d, prob.A, prob.C, y_d),
                  turnpike::PeriodMismatch);
}

TEST_CASE("solve_periodic: constant targets collapse to the steady triple") {
  auto prob = turnpike::double_integrator_circle();
  Vector y_const(2), u_const(1);
  y_const << 1.0, 0.0;
  u_const << 0.0;
  prob.y_d = turnpike::SignalSpec::make_constant(y_const);
  prob.u_d = turnpike::SignalSpec::make_constant(u_const);

  const auto care = turnpike::solve_care(prob.A, prob.B, prob.C, prob.Q);
  const Matrix G = prob.B * prob.Q.inverse() * prob.B.transpose();
  const auto lyap = turnpike::solve_lyapunov(care.A_cl, G);
  const auto tp = turnpike::solve_periodic(prob, care, lyap, 64);
  const auto s = turnpike::solve_static(prob.A, prob.B, prob.C, prob.Q,
                                        y_const, u_const);
  for (int k = 0; k <= 64; ++k) {
    CHECK((tp.y_pi.values.row(k).transpose() - s.y_s).norm() <= 1e-9);
    CHECK((tp.lambda_pi.values.row(k).transpose() - s.lambda_s).norm() <=
          1e-9);
    CHECK((tp.u_pi.values.row(k).transpose() - s.u_s).norm() <= 1e-9);
  }
}

TEST_CASE("solve_periodic: orbit invariants on the double integrator") {
  const auto prob = turnpike::double_integrator_circle();
  const auto care = turnpike::solve_care(prob.A, prob.B, prob.C, prob.Q);
  const Matrix G = prob.B * prob.Q.inverse() * prob.B.transpose();
  const auto lyap = turnpike::solve_lyapunov(care.A_cl, G);
  const auto tp = turnpike::solve_periodic(prob, care, lyap, 200);

  const int N = 200;
  const double x_max = std::max({tp.y_pi.values.lpNorm<Eigen::Infinity>(),
                                 tp.lambda_pi.values.lpNorm<Eigen::Infinity>(),
                                 tp.u_pi.values.lpNorm<Eigen::Infinity>()});
  CHECK((tp.y_pi.values.row(N) - tp.y_pi.values.row(0)).norm() <=
        1e-8 * (1.0 + x_max));
  CHECK((tp.lambda_pi.values.row(N) - tp.lambda_pi.values.row(0)).norm() <=
        1e-8 * (1.0 + x_max));

  // The control is defined through the costate; re-derive it independently.
  const Matrix Qinv = prob.Q.inverse();
  for (int k = 0; k <= N; ++k) {
    const Vector u_ref =
        prob.u_d_at(static_cast<double>(k) / N) +
        Qinv * prob.B.transpose() * tp.lambda_pi.values.row(k).transpose();
    CHECK((tp.u_pi.values.row(k).transpose() - u_ref).norm() <= 1e-12);
  }
  CHECK(tp.optimality_residual >= 0.0);
}

TEST_CASE("solve_periodic: optimality residual shrinks at second order") {
  const auto prob = turnpike::double_integrator_circle();
  const auto care = turnpike::solve_care(prob.A, prob.B, prob.C, prob.Q);
  const Matrix G = prob.B * prob.Q.inverse() * prob.B.transpose();
  const auto lyap = turnpike::solve_lyapunov(care.A_cl, G);
  const double r_coarse =
      turnpike::solve_periodic(prob, care, lyap, 100).optimality_residual;
  const double r_fine =
      turnpike::solve_periodic(prob, care, lyap, 400).optimality_residual;
  CHECK(r_coarse > 0.0);
  CHECK(r_fine <= r_coarse / 6.0);
}
