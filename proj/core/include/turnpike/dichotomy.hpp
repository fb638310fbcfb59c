#pragma once

#include "turnpike/linalg.hpp"

namespace turnpike {

// The doubled-state generator of the extremal equations,
//   d/dt (y, lambda) = M (y, lambda) + forcing,
// with blocks M = [[A, B Q^{-1} B^T], [C^T C, -A^T]].
struct HamiltonianBlock {
  Matrix M;  // 2n x 2n
  Eigen::Index n = 0;
};

// Change of variables (z, q) = T (y, lambda) that splits M into a
// contracting part A_cl and an expanding part -A_cl^T:
//   T = [[I + EP, E], [P, I]],   T^{-1} = [[I, -E], [-P, I + PE]].
struct DichotomyTransform {
  Matrix P, E;      // the Riccati and Lyapunov blocks, kept separately
  Matrix T, T_inv;  // 2n x 2n
  Eigen::Index n = 0;
};

HamiltonianBlock assemble_hamiltonian(const Matrix& A, const Matrix& B,
                                      const Matrix& C, const Matrix& Q);

DichotomyTransform build_transform(const Matrix& P, const Matrix& E);

// || T M T^{-1} - diag(A_cl, -A_cl^T) ||_F. Small only when P and E solve
// the Riccati and Lyapunov equations of the same problem. Passing an empty
// A_cl derives the contracting block A - G P from Mb and tr.
double block_diagonalize(const HamiltonianBlock& Mb,
                         const DichotomyTransform& tr, const Matrix& A_cl);

// ||T||_F * ||T^{-1}||_F, reported as a conditioning diagnostic for the
// change of variables (no guarantee attached).
double transform_conditioning(const DichotomyTransform& tr);

}  // namespace turnpike
