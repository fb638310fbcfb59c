#pragma once

#include <functional>

#include "turnpike/linalg.hpp"
#include "turnpike/model_zoo.hpp"
#include "turnpike/riccati.hpp"

namespace turnpike {

// Uniformly sampled Pi-periodic signal: row k of `values` is the sample at
// t_k = k * period / N for k = 0..N (row N repeats row 0 up to solver
// tolerance). eval() extends by periodicity with linear interpolation.
struct PeriodicSignal {
  double period = 0.0;
  Matrix values;  // (N+1) x dim

  Eigen::Index samples() const { return values.rows() - 1; }
  Eigen::Index dim() const { return values.cols(); }
  Vector eval(double t) const;
};

using VectorSignal = std::function<Vector(double)>;

// exp(Pi * A_cl). Spectral radius < 1 whenever A_cl is Hurwitz and Pi > 0.
Matrix monodromy(const Matrix& A_cl, double Pi);

// Unique periodic solution of z' = A_cl z + g(t). The initial value is the
// fixed point of the discrete period map (Crank-Nicolson propagator), so
// discrete periodicity holds to roundoff at every N; stepping then fills the
// grid. N >= 16.
PeriodicSignal periodic_z(const Matrix& A_cl, const VectorSignal& g,
                          double Pi, int N);

// Unique periodic solution of q' = -A_cl^T q + h(t). Computed through the
// reversal r(s) = q(Pi - s), which satisfies the stable forward system
// r' = A_cl^T r - h(Pi - s), then unreversed.
PeriodicSignal periodic_q(const Matrix& A_cl, const VectorSignal& h,
                          double Pi, int N);

struct PeriodicTurnpike {
  PeriodicSignal z, q;          // decoupled coordinates
  PeriodicSignal y_pi, lambda_pi;  // state and adjoint turnpikes
  PeriodicSignal u_pi;          // control turnpike
  double optimality_residual = 0.0;  // max central-difference residual of the
                                     // periodic extremal equations
};

// Applies the inverse dichotomy blocks pointwise:
//   y_pi = z - E q,   lambda_pi = -P z + (I + P E) q,
//   u_pi = u_d + Q^{-1} B^T lambda_pi.
// The trailing (A, C, y_d) operands are needed only to evaluate the
// optimality residual of the extremal equations by central differences.
PeriodicTurnpike synthesize(const PeriodicSignal& z, const PeriodicSignal& q,
                            const Matrix& P, const Matrix& E, const Matrix& Q,
                            const Matrix& B, const VectorSignal& u_d,
                            const Matrix& A, const Matrix& C,
                            const VectorSignal& y_d);

// Assembles the decoupled forcings
//   g(t) = (I + E P) B u_d(t) - E C^T C y_d(t),
//   h(t) = P B u_d(t) - C^T C y_d(t)
// from the problem data and runs periodic_z / periodic_q / synthesize on an
// N-sample grid over one period.
PeriodicTurnpike solve_periodic(const LqProblem& problem,
                                const RiccatiSolution& care,
                                const LyapunovSolution& lyap, int N);

}  // namespace turnpike
