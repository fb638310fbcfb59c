#include "turnpike/horizon.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "turnpike/dichotomy.hpp"
#include "turnpike/errors.hpp"
#include "turnpike/io.hpp"

namespace turnpike {
namespace {

void require_horizon(double T, int N) {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw InvalidArgument("horizon must be positive and finite");
  }
  if (N < 16) {
    throw InvalidArgument("horizon grids need at least 16 steps, got " +
                          std::to_string(N));
  }
}

// Number of samples per period chosen so the periodic grid aligns with the
// horizon grid whenever N Pi / T is an integer (up to roundoff).
int periodic_samples(double Pi, double T, int N) {
  const double x = static_cast<double>(N) * Pi / T;
  const double r = std::round(x);
  double n_per = (std::abs(x - r) <= 1e-9 * (1.0 + x)) ? r : std::ceil(x);
  if (n_per < 16.0) n_per = 16.0;
  return static_cast<int>(n_per);
}

struct SweepResult {
  Matrix y;       // (N+1) x n
  Matrix lambda;  // (N+1) x n
};

// Trapezoidal one-step form of the extremal equations
//   d/dt (y, lambda) = M (y, lambda) + f(t),  M = [[A, G], [H, -A^T]],
// with boundary data y_0 and lambda_N. The two-point structure is resolved
// by the backward elimination lambda_k = S_k y_k + s_k (each step one dense
// solve), then a forward substitution fills the state. The assembled
// one-step equations are re-checked afterwards; an elimination breakdown
// surfaces as a large residual.
SweepResult cn_sweep(const Matrix& A, const Matrix& G, const Matrix& H,
                     const VectorSignal* f_y, const VectorSignal* f_l,
                     const Vector& y0, const Vector& lambdaT, double T,
                     int N) {
  const Eigen::Index n = A.rows();
  const double dt = T / N;

  Matrix M(2 * n, 2 * n);
  M.topLeftCorner(n, n) = A;
  M.topRightCorner(n, n) = G;
  M.bottomLeftCorner(n, n) = H;
  M.bottomRightCorner(n, n) = -A.transpose();

  const Matrix I2 = Matrix::Identity(2 * n, 2 * n);
  Eigen::PartialPivLU<Matrix> left((I2 - 0.5 * dt * M).eval());
  const Matrix F = left.solve(I2 + 0.5 * dt * M);
  const Matrix F11 = F.topLeftCorner(n, n);
  const Matrix F12 = F.topRightCorner(n, n);
  const Matrix F21 = F.bottomLeftCorner(n, n);
  const Matrix F22 = F.bottomRightCorner(n, n);

  // Step constants c_k = L^{-1} (dt/2)(f_k + f_{k+1}), split as (gy_k, gl_k).
  Matrix gy = Matrix::Zero(n, N);
  Matrix gl = Matrix::Zero(n, N);
  if (f_y != nullptr || f_l != nullptr) {
    Vector f_prev = Vector::Zero(2 * n);
    if (f_y) f_prev.head(n) = (*f_y)(0.0);
    if (f_l) f_prev.tail(n) = (*f_l)(0.0);
    for (int k = 0; k < N; ++k) {
      Vector f_next = Vector::Zero(2 * n);
      const double t_next = (k + 1) * dt;
      if (f_y) f_next.head(n) = (*f_y)(t_next);
      if (f_l) f_next.tail(n) = (*f_l)(t_next);
      const Vector c = left.solve((0.5 * dt * (f_prev + f_next)).eval());
      gy.col(k) = c.head(n);
      gl.col(k) = c.tail(n);
      f_prev = f_next;
    }
  }

  // Backward elimination of lambda_k = S_k y_k + s_k from lambda_N = lambdaT.
  std::vector<Matrix> S(static_cast<std::size_t>(N) + 1);
  Matrix s(n, N + 1);
  S[static_cast<std::size_t>(N)] = Matrix::Zero(n, n);
  s.col(N) = lambdaT;
  for (int k = N - 1; k >= 0; --k) {
    const Matrix& S_next = S[static_cast<std::size_t>(k) + 1];
    Eigen::PartialPivLU<Matrix> pivot((F22 - S_next * F12).eval());
    S[static_cast<std::size_t>(k)] = pivot.solve(S_next * F11 - F21);
    s.col(k) = pivot.solve(
        (S_next * gy.col(k) + s.col(k + 1) - gl.col(k)).eval());
  }

  SweepResult out;
  out.y.resize(N + 1, n);
  out.lambda.resize(N + 1, n);
  Vector y = y0;
  for (int k = 0; k <= N; ++k) {
    const Vector lambda = S[static_cast<std::size_t>(k)] * y + s.col(k);
    out.y.row(k) = y.transpose();
    out.lambda.row(k) = lambda.transpose();
    if (k < N) {
      y = F11 * y + F12 * lambda + gy.col(k);
    }
  }

  // Residual of the assembled one-step equations over the whole grid.
  double x_max = std::max(out.y.lpNorm<Eigen::Infinity>(),
                          out.lambda.lpNorm<Eigen::Infinity>());
  if (!std::isfinite(x_max)) {
    throw SingularDiscretization("elimination sweep produced non-finite "
                                 "values");
  }
  double step_residual = 0.0;
  Vector x_k(2 * n), x_next(2 * n);
  for (int k = 0; k < N; ++k) {
    x_k.head(n) = out.y.row(k).transpose();
    x_k.tail(n) = out.lambda.row(k).transpose();
    x_next.head(n) = out.y.row(k + 1).transpose();
    x_next.tail(n) = out.lambda.row(k + 1).transpose();
    Vector c(2 * n);
    c.head(n) = gy.col(k);
    c.tail(n) = gl.col(k);
    const Vector r = x_next - (F * x_k + c);
    step_residual = std::max(step_residual, r.lpNorm<Eigen::Infinity>());
  }
  if (step_residual > 1e-7 * (1.0 + x_max)) {
    throw SingularDiscretization(
        "one-step equations are violated after elimination (residual " +
        std::to_string(step_residual) + ")");
  }
  return out;
}

// max over interior nodes of the central-difference residual of the
// extremal equations, plus the boundary gaps.
double bvp_residual_of(const Matrix& A, const Matrix& G, const Matrix& H,
                       const VectorSignal* f_y, const VectorSignal* f_l,
                       const Vector& y0, const Vector& lambdaT,
                       const Vector& grid, const Matrix& y,
                       const Matrix& lambda) {
  const Eigen::Index N = grid.size() - 1;
  const Eigen::Index n = y.cols();
  const double dt = grid(1) - grid(0);
  double residual = std::max((y.row(0).transpose() - y0).norm(),
                             (lambda.row(N).transpose() - lambdaT).norm());
  for (Eigen::Index k = 1; k < N; ++k) {
    const Vector yk = y.row(k).transpose();
    const Vector lk = lambda.row(k).transpose();
    Vector ry = (y.row(k + 1) - y.row(k - 1)).transpose() / (2.0 * dt) -
                (A * yk + G * lk);
    Vector rl = (lambda.row(k + 1) - lambda.row(k - 1)).transpose() /
                    (2.0 * dt) -
                (H * yk - A.transpose() * lk);
    if (f_y) ry -= (*f_y)(grid(k));
    if (f_l) rl -= (*f_l)(grid(k));
    residual = std::max(
        {residual, ry.lpNorm<Eigen::Infinity>(), rl.lpNorm<Eigen::Infinity>()});
  }
  return residual;
}

struct ProblemOperators {
  Matrix G;  // B Q^{-1} B^T
  Matrix H;  // C^T C
  Eigen::LLT<Matrix> Q_llt;
};

ProblemOperators problem_operators(const LqProblem& problem) {
  ProblemOperators ops;
  ops.Q_llt.compute(problem.Q);
  if (ops.Q_llt.info() != Eigen::Success) {
    throw SingularQ("control weight must be symmetric positive definite");
  }
  ops.G = problem.B * ops.Q_llt.solve(Matrix(problem.B.transpose()));
  ops.H = problem.C.transpose() * problem.C;
  return ops;
}

Matrix control_from_costate(const LqProblem& problem,
                            const Eigen::LLT<Matrix>& Q_llt,
                            const Vector& grid, const Matrix& lambda) {
  Matrix u(grid.size(), problem.m());
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    u.row(k) = (problem.u_d_at(grid(k)) +
                Q_llt.solve(problem.B.transpose() *
                            lambda.row(k).transpose()))
                   .transpose();
  }
  return u;
}

}  // namespace

BoundaryCoupling build_boundary_coupling(const Matrix& P, const Matrix& E,
                                         const Matrix& S_T, const Vector& dy0,
                                         const Vector& dlT) {
  const Eigen::Index n = P.rows();
  require_shape(P, n, n, "Riccati block");
  require_shape(E, n, n, "Lyapunov block");
  require_shape(S_T, n, n, "horizon propagator");
  if (dy0.size() != n || dlT.size() != n) {
    throw DimensionMismatch("boundary data must match the state dimension");
  }

  BoundaryCoupling bc;
  bc.K.resize(2 * n, 2 * n);
  bc.K.topLeftCorner(n, n) = Matrix::Identity(n, n);
  bc.K.topRightCorner(n, n) = -E * S_T.transpose();
  bc.K.bottomLeftCorner(n, n) = -P * S_T;
  bc.K.bottomRightCorner(n, n) = Matrix::Identity(n, n) + P * E;
  bc.rhs.resize(2 * n);
  bc.rhs.head(n) = dy0;
  bc.rhs.tail(n) = dlT;

  bc.solution = bc.K.partialPivLu().solve(bc.rhs);
  if (!bc.solution.allFinite() ||
      (bc.K * bc.solution - bc.rhs).norm() > 1e-10 * (1.0 + bc.rhs.norm())) {
    throw SingularCoupling("boundary coupling system is numerically "
                           "singular");
  }
  return bc;
}

Trajectory solve_horizon_dichotomy(const LqProblem& problem, double T,
                                   int N) {
  require_horizon(T, N);
  const Eigen::Index n = problem.n();
  const auto ops = problem_operators(problem);
  const RiccatiSolution care =
      solve_care(problem.A, problem.B, problem.C, problem.Q);
  const LyapunovSolution lyap = solve_lyapunov(care.A_cl, ops.G);

  const int N_per = periodic_samples(problem.Pi, T, N);
  const PeriodicTurnpike tp = solve_periodic(problem, care, lyap, N_per);

  Trajectory tr;
  tr.grid = Vector::LinSpaced(N + 1, 0.0, T);

  // Deviation boundary data and the contracting/expanding split.
  const Vector dy0 = problem.y0 - tp.y_pi.eval(0.0);
  const Vector dlT = -tp.lambda_pi.eval(tr.grid(N));
  const Matrix S_T = monodromy(care.A_cl, T);
  const BoundaryCoupling bc =
      build_boundary_coupling(care.P, lyap.E, S_T, dy0, dlT);
  const Vector v0 = bc.solution.head(n);
  const Vector wT = bc.solution.tail(n);

  // March v forward and w backward with the exact one-step propagator, so
  // the deviation carries no discretization error of its own.
  const double dt = T / N;
  const Matrix S_dt = expm(Matrix(dt * care.A_cl));
  Matrix v(N + 1, n), w(N + 1, n);
  Vector vk = v0;
  Vector rk = wT;  // r_j = w_{N-j}
  for (int k = 0; k <= N; ++k) {
    v.row(k) = vk.transpose();
    w.row(N - k) = rk.transpose();
    if (k < N) {
      vk = S_dt * vk;
      rk = S_dt.transpose() * rk;
    }
  }

  tr.y.resize(N + 1, n);
  tr.lambda.resize(N + 1, n);
  const Matrix IPE = Matrix::Identity(n, n) + care.P * lyap.E;
  for (int k = 0; k <= N; ++k) {
    const Vector vkk = v.row(k).transpose();
    const Vector wkk = w.row(k).transpose();
    tr.y.row(k) = (tp.y_pi.eval(tr.grid(k)) + vkk - lyap.E * wkk).transpose();
    tr.lambda.row(k) = (tp.lambda_pi.eval(tr.grid(k)) - care.P * vkk +
                        IPE * wkk)
                           .transpose();
  }
  // The initial state is data, not an approximation.
  tr.y.row(0) = problem.y0.transpose();

  tr.u = control_from_costate(problem, ops.Q_llt, tr.grid, tr.lambda);

  const auto f_y = [&](double t) {
    return (problem.B * problem.u_d_at(t)).eval();
  };
  const auto f_l = [&](double t) {
    return (-ops.H * problem.y_d_at(t)).eval();
  };
  const VectorSignal f_y_sig = f_y, f_l_sig = f_l;
  tr.bvp_residual =
      bvp_residual_of(problem.A, ops.G, ops.H, &f_y_sig, &f_l_sig,
                      problem.y0, Vector::Zero(n), tr.grid, tr.y, tr.lambda);
  return tr;
}

Trajectory solve_horizon_direct(const LqProblem& problem, double T, int N) {
  require_horizon(T, N);
  const Eigen::Index n = problem.n();
  const auto ops = problem_operators(problem);

  const auto f_y = [&](double t) {
    return (problem.B * problem.u_d_at(t)).eval();
  };
  const auto f_l = [&](double t) {
    return (-ops.H * problem.y_d_at(t)).eval();
  };
  const VectorSignal f_y_sig = f_y, f_l_sig = f_l;

  const SweepResult sweep =
      cn_sweep(problem.A, ops.G, ops.H, &f_y_sig, &f_l_sig, problem.y0,
               Vector::Zero(n), T, N);

  Trajectory tr;
  tr.grid = Vector::LinSpaced(N + 1, 0.0, T);
  tr.y = sweep.y;
  tr.lambda = sweep.lambda;
  tr.u = control_from_costate(problem, ops.Q_llt, tr.grid, tr.lambda);
  tr.bvp_residual =
      bvp_residual_of(problem.A, ops.G, ops.H, &f_y_sig, &f_l_sig,
                      problem.y0, Vector::Zero(n), tr.grid, tr.y, tr.lambda);
  return tr;
}

std::vector<std::pair<double, double>> check_stability_estimate(
    const LqProblem& problem, const std::vector<double>& T_list,
    int samples_per_unit_time, std::uint64_t seed) {
  if (samples_per_unit_time < 1) {
    throw InvalidArgument("need at least one sample per unit time");
  }
  const Eigen::Index n = problem.n();
  const auto ops = problem_operators(problem);

  // One boundary draw shared by every horizon, so r(T) varies only in T.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vector y0(n), lambdaT(n);
  for (Eigen::Index i = 0; i < n; ++i) y0(i) = unit(rng);
  for (Eigen::Index i = 0; i < n; ++i) lambdaT(i) = unit(rng);
  const double denom = y0.norm() + lambdaT.norm();

  std::vector<std::pair<double, double>> rows;
  rows.reserve(T_list.size());
  for (const double T : T_list) {
    if (!(T > 0.0) || !std::isfinite(T)) {
      throw InvalidArgument("horizons must be positive and finite");
    }
    const int N = std::max(
        16, static_cast<int>(std::ceil(T * samples_per_unit_time)));
    const SweepResult sweep = cn_sweep(problem.A, ops.G, ops.H, nullptr,
                                       nullptr, y0, lambdaT, T, N);
    const double numer = sweep.y.row(N).norm() + sweep.lambda.row(0).norm();
    rows.emplace_back(T, numer / denom);
  }
  return rows;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const Eigen::Index n = traj.y.cols();
  const Eigen::Index m = traj.u.cols();
  out << 't';
  for (Eigen::Index j = 1; j <= n; ++j) out << ",y_" << j;
  for (Eigen::Index j = 1; j <= n; ++j) out << ",lambda_" << j;
  for (Eigen::Index j = 1; j <= m; ++j) out << ",u_" << j;
  out << '\n';
  for (Eigen::Index k = 0; k < traj.grid.size(); ++k) {
    out << format_double(traj.grid(k));
    for (Eigen::Index j = 0; j < n; ++j) {
      out << ',' << format_double(traj.y(k, j));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      out << ',' << format_double(traj.lambda(k, j));
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      out << ',' << format_double(traj.u(k, j));
    }
    out << '\n';
  }
}

}  // namespace turnpike
