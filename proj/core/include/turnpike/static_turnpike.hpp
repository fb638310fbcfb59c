#pragma once

#include "turnpike/linalg.hpp"

namespace turnpike {

// Steady optimal triple: equilibrium of the extremal equations for constant
// targets, with u_s recovered from the stationarity relation
// u_s = u_d + Q^{-1} B^T lambda_s.
struct SteadyTriple {
  Vector y_s;
  Vector u_s;
  Vector lambda_s;
  double residual_norm = 0.0;
};

// Solves the coupled steady system
//   A y_s + B Q^{-1} B^T lambda_s + B u_d = 0
//   C^T C y_s - A^T lambda_s - C^T C y_d = 0
// as one 2n x 2n linear solve (dense LU with partial pivoting).
SteadyTriple solve_static(const Matrix& A, const Matrix& B, const Matrix& C,
                          const Matrix& Q, const Vector& y_d,
                          const Vector& u_d);

}  // namespace turnpike
