#include "turnpike/static_turnpike.hpp"

#include "turnpike/dichotomy.hpp"
#include "turnpike/errors.hpp"

namespace turnpike {

SteadyTriple solve_static(const Matrix& A, const Matrix& B, const Matrix& C,
                          const Matrix& Q, const Vector& y_d,
                          const Vector& u_d) {
  const HamiltonianBlock block = assemble_hamiltonian(A, B, C, Q);
  const Eigen::Index n = block.n;
  const Eigen::Index m = B.cols();
  if (y_d.size() != n) {
    throw DimensionMismatch("state target must have one entry per state");
  }
  if (u_d.size() != m) {
    throw DimensionMismatch("control target must have one entry per control");
  }

  // M (y_s, lambda_s) = (-B u_d, C^T C y_d): the equilibrium of the forced
  // extremal equations.
  Vector rhs(2 * n);
  rhs.head(n) = -B * u_d;
  rhs.tail(n) = C.transpose() * C * y_d;

  const Eigen::FullPivLU<Matrix> lu(block.M);
  if (!lu.isInvertible()) {
    throw SingularSystem("steady extremal system is singular (rank " +
                         std::to_string(lu.rank()) + " of " +
                         std::to_string(2 * n) + ")");
  }
  const Vector sol = lu.solve(rhs);
  const double residual = (block.M * sol - rhs).norm();
  const double tol = 1e-9 * (1.0 + y_d.norm() + u_d.norm());
  if (!sol.allFinite() || residual > tol) {
    throw SingularSystem("steady extremal system is singular or nearly so "
                         "(residual " +
                         std::to_string(residual) + ")");
  }

  SteadyTriple triple;
  triple.y_s = sol.head(n);
  triple.lambda_s = sol.tail(n);
  Eigen::LLT<Matrix> Q_llt(Q);
  triple.u_s = u_d + Q_llt.solve(B.transpose() * triple.lambda_s);
  triple.residual_norm = residual;
  return triple;
}

}  // namespace turnpike
