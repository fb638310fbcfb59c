#include "turnpike/dichotomy.hpp"

#include "turnpike/errors.hpp"

namespace turnpike {

HamiltonianBlock assemble_hamiltonian(const Matrix& A, const Matrix& B,
                                      const Matrix& C, const Matrix& Q) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw DimensionMismatch("state matrix must be square");
  require_shape(B, n, B.cols(), "input map");
  if (C.cols() != n) {
    throw DimensionMismatch("observation map must have one column per state");
  }
  require_shape(Q, B.cols(), B.cols(), "control weight");
  require_symmetric(Q, "control weight");
  Eigen::LLT<Matrix> Q_llt(Q);
  if (Q_llt.info() != Eigen::Success) {
    throw SingularQ("control weight must be symmetric positive definite");
  }

  HamiltonianBlock block;
  block.n = n;
  block.M.resize(2 * n, 2 * n);
  block.M.topLeftCorner(n, n) = A;
  block.M.topRightCorner(n, n) = B * Q_llt.solve(Matrix(B.transpose()));
  block.M.bottomLeftCorner(n, n) = C.transpose() * C;
  block.M.bottomRightCorner(n, n) = -A.transpose();
  return block;
}

DichotomyTransform build_transform(const Matrix& P, const Matrix& E) {
  const Eigen::Index n = P.rows();
  require_shape(P, n, n, "Riccati block");
  require_shape(E, n, n, "Lyapunov block");

  DichotomyTransform tr;
  tr.n = n;
  tr.P = P;
  tr.E = E;
  const Matrix I = Matrix::Identity(n, n);

  tr.T.resize(2 * n, 2 * n);
  tr.T.topLeftCorner(n, n) = I + E * P;
  tr.T.topRightCorner(n, n) = E;
  tr.T.bottomLeftCorner(n, n) = P;
  tr.T.bottomRightCorner(n, n) = I;

  tr.T_inv.resize(2 * n, 2 * n);
  tr.T_inv.topLeftCorner(n, n) = I;
  tr.T_inv.topRightCorner(n, n) = -E;
  tr.T_inv.bottomLeftCorner(n, n) = -P;
  tr.T_inv.bottomRightCorner(n, n) = I + P * E;
  return tr;
}

double block_diagonalize(const HamiltonianBlock& Mb,
                         const DichotomyTransform& tr, const Matrix& A_cl) {
  const Eigen::Index n = Mb.n;
  if (tr.n != n) {
    throw DimensionMismatch("transform and generator dimensions differ");
  }
  Matrix closed_loop;
  if (A_cl.size() == 0) {
    // No reference supplied: derive the contracting block A - G P from the
    // generator and the transform.
    closed_loop =
        Mb.M.topLeftCorner(n, n) - Mb.M.topRightCorner(n, n) * tr.P;
  } else {
    require_shape(A_cl, n, n, "closed-loop matrix");
    closed_loop = A_cl;
  }

  Matrix D = Matrix::Zero(2 * n, 2 * n);
  D.topLeftCorner(n, n) = closed_loop;
  D.bottomRightCorner(n, n) = -closed_loop.transpose();
  return (tr.T * Mb.M * tr.T_inv - D).norm();
}

double transform_conditioning(const DichotomyTransform& tr) {
  return tr.T.norm() * tr.T_inv.norm();
}

}  // namespace turnpike
