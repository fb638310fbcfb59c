#include "turnpike/periodic.hpp"

#include <cmath>
#include <string>

#include "turnpike/errors.hpp"

namespace turnpike {
namespace {

// One period of the trapezoidal one-step map for x' = A x + g(t):
//   (I - dt/2 A) x_{k+1} = (I + dt/2 A) x_k + dt/2 (g_k + g_{k+1}).
// The periodic orbit is the fixed point of the period map, found from
// (I - F^N) x_0 = forced response, then the grid is filled by stepping.
PeriodicSignal periodic_orbit(const Matrix& A, const VectorSignal& g,
                              double Pi, int N) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw DimensionMismatch("orbit matrix must be square");
  if (!(Pi > 0.0) || !std::isfinite(Pi)) {
    throw InvalidArgument("period must be positive and finite");
  }
  if (N < 16) {
    throw InvalidArgument("periodic grids need at least 16 samples, got " +
                          std::to_string(N));
  }

  const double dt = Pi / N;
  const Matrix I = Matrix::Identity(n, n);
  Eigen::PartialPivLU<Matrix> left((I - 0.5 * dt * A).eval());
  const Matrix F = left.solve(I + 0.5 * dt * A);

  // Step contributions b_k and the zero-initial-condition response c.
  Matrix b(n, N);
  Vector g_prev = g(0.0);
  Vector c = Vector::Zero(n);
  for (int k = 0; k < N; ++k) {
    const Vector g_next = g((k + 1) * dt);
    b.col(k) = left.solve((0.5 * dt * (g_prev + g_next)).eval());
    c = F * c + b.col(k);
    g_prev = g_next;
  }

  const Matrix period_map = I - matrix_power(F, N);
  const Vector z0 = period_map.partialPivLu().solve(c);
  if (!z0.allFinite() ||
      (period_map * z0 - c).norm() > 1e-9 * (1.0 + c.norm())) {
    throw SingularMonodromy("discrete period map has no unique fixed point");
  }

  PeriodicSignal sig;
  sig.period = Pi;
  sig.values.resize(N + 1, n);
  Vector z = z0;
  sig.values.row(0) = z.transpose();
  for (int k = 0; k < N; ++k) {
    z = F * z + b.col(k);
    sig.values.row(k + 1) = z.transpose();
  }
  // Discrete periodicity is part of the contract; make it exact.
  sig.values.row(N) = sig.values.row(0);
  return sig;
}

}  // namespace

Vector PeriodicSignal::eval(double t) const {
  const Eigen::Index N = samples();
  double s = t - std::floor(t / period) * period;
  if (period - s <= 1e-12 * period) s = 0.0;
  const double pos = s / period * static_cast<double>(N);
  Eigen::Index k = static_cast<Eigen::Index>(std::floor(pos));
  if (k >= N) k = N - 1;
  const double theta = pos - static_cast<double>(k);
  return ((1.0 - theta) * values.row(k) + theta * values.row(k + 1))
      .transpose();
}

Matrix monodromy(const Matrix& A_cl, double Pi) {
  if (A_cl.rows() != A_cl.cols()) {
    throw DimensionMismatch("closed-loop matrix must be square");
  }
  if (!(Pi > 0.0) || !std::isfinite(Pi)) {
    throw InvalidArgument("period must be positive and finite");
  }
  return expm(Matrix(Pi * A_cl));
}

PeriodicSignal periodic_z(const Matrix& A_cl, const VectorSignal& g,
                          double Pi, int N) {
  return periodic_orbit(A_cl, g, Pi, N);
}

PeriodicSignal periodic_q(const Matrix& A_cl, const VectorSignal& h,
                          double Pi, int N) {
  // q' = -A_cl^T q + h blows up forward in time; its reversal
  // r(s) = q(Pi - s) obeys the contracting system r' = A_cl^T r - h(Pi - s).
  const auto reversed_forcing = [&](double s) { return (-h(Pi - s)).eval(); };
  PeriodicSignal r =
      periodic_orbit(Matrix(A_cl.transpose()), reversed_forcing, Pi, N);
  PeriodicSignal q;
  q.period = Pi;
  q.values.resize(r.values.rows(), r.values.cols());
  for (Eigen::Index k = 0; k < r.values.rows(); ++k) {
    q.values.row(k) = r.values.row(r.values.rows() - 1 - k);
  }
  return q;
}

PeriodicTurnpike synthesize(const PeriodicSignal& z, const PeriodicSignal& q,
                            const Matrix& P, const Matrix& E, const Matrix& Q,
                            const Matrix& B, const VectorSignal& u_d,
                            const Matrix& A, const Matrix& C,
                            const VectorSignal& y_d) {
  const Eigen::Index n = P.rows();
  if (z.dim() != n || q.dim() != n) {
    throw GridMismatch("orbit dimensions must match the Riccati block");
  }
  if (z.samples() != q.samples()) {
    throw GridMismatch("decoupled orbits are sampled on different grids");
  }
  if (z.period != q.period) {
    throw PeriodMismatch("decoupled orbits have different periods");
  }
  const Eigen::Index N = z.samples();
  if (N < 2) throw InvalidArgument("orbit grids need at least two samples");

  Eigen::LLT<Matrix> Q_llt(Q);
  if (Q_llt.info() != Eigen::Success) {
    throw SingularQ("control weight must be symmetric positive definite");
  }

  PeriodicTurnpike tp;
  tp.z = z;
  tp.q = q;
  tp.y_pi.period = tp.lambda_pi.period = tp.u_pi.period = z.period;
  tp.y_pi.values.resize(N + 1, n);
  tp.lambda_pi.values.resize(N + 1, n);
  tp.u_pi.values.resize(N + 1, B.cols());

  const Matrix IPE = Matrix::Identity(n, n) + P * E;
  const double dt = z.period / static_cast<double>(N);
  for (Eigen::Index k = 0; k <= N; ++k) {
    const Vector zk = z.values.row(k).transpose();
    const Vector qk = q.values.row(k).transpose();
    const Vector yk = zk - E * qk;
    const Vector lk = -P * zk + IPE * qk;
    tp.y_pi.values.row(k) = yk.transpose();
    tp.lambda_pi.values.row(k) = lk.transpose();
    tp.u_pi.values.row(k) =
        (u_d(k * dt) + Q_llt.solve(B.transpose() * lk)).transpose();
  }

  // Cyclic central-difference residual of the extremal equations
  //   y' = A y + G lambda + B u_d,   lambda' = C^T C y - A^T lambda - C^T C y_d
  // over the rows 0..N-1 (row N duplicates row 0).
  const Matrix G = B * Q_llt.solve(Matrix(B.transpose()));
  const Matrix H = C.transpose() * C;
  double residual = 0.0;
  for (Eigen::Index k = 0; k < N; ++k) {
    const Eigen::Index prev = (k + N - 1) % N;
    const Eigen::Index next = (k + 1) % N;
    const Vector yk = tp.y_pi.values.row(k).transpose();
    const Vector lk = tp.lambda_pi.values.row(k).transpose();
    const Vector dy = (tp.y_pi.values.row(next) - tp.y_pi.values.row(prev))
                          .transpose() /
                      (2.0 * dt);
    const Vector dl = (tp.lambda_pi.values.row(next) -
                       tp.lambda_pi.values.row(prev))
                          .transpose() /
                      (2.0 * dt);
    const Vector ry = dy - (A * yk + G * lk + B * u_d(k * dt));
    const Vector rl = dl - (H * yk - A.transpose() * lk - H * y_d(k * dt));
    residual = std::max({residual, ry.lpNorm<Eigen::Infinity>(),
                         rl.lpNorm<Eigen::Infinity>()});
  }
  tp.optimality_residual = residual;
  return tp;
}

PeriodicTurnpike solve_periodic(const LqProblem& problem,
                                const RiccatiSolution& care,
                                const LyapunovSolution& lyap, int N) {
  const Matrix& P = care.P;
  const Matrix& E = lyap.E;
  const Eigen::Index n = problem.n();
  require_shape(P, n, n, "Riccati block");
  require_shape(E, n, n, "Lyapunov block");

  const Matrix IEP = Matrix::Identity(n, n) + E * P;
  const Matrix H = problem.C.transpose() * problem.C;
  const auto g = [&](double t) {
    return (IEP * (problem.B * problem.u_d_at(t)) -
            E * (H * problem.y_d_at(t)))
        .eval();
  };
  const auto h = [&](double t) {
    return (P * (problem.B * problem.u_d_at(t)) - H * problem.y_d_at(t))
        .eval();
  };

  const PeriodicSignal z = periodic_z(care.A_cl, g, problem.Pi, N);
  const PeriodicSignal q = periodic_q(care.A_cl, h, problem.Pi, N);
  const auto u_d = [&](double t) { return problem.u_d_at(t); };
  const auto y_d = [&](double t) { return problem.y_d_at(t); };
  return synthesize(z, q, P, E, problem.Q, problem.B, u_d, problem.A,
                    problem.C, y_d);
}

}  // namespace turnpike
