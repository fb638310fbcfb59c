#include "turnpike/riccati.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "turnpike/errors.hpp"
#include "turnpike/linalg.hpp"

namespace turnpike {
namespace {

// The LAPACK Schur reordering callback carries no user-data pointer, so the
// stability threshold travels through a thread-local instead.
thread_local double g_select_threshold = 0.0;

lapack_logical select_strictly_stable(const double* re, const double*) {
  return *re < 0.0 ? 1 : 0;
}

lapack_logical select_at_or_above_threshold(const double* re, const double*) {
  return *re >= g_select_threshold ? 1 : 0;
}

// Real ordered Schur decomposition A = U T U^T with the eigenvalues chosen
// by `select` moved to the leading block. Returns the number selected.
lapack_int ordered_schur(const Matrix& A, LAPACK_D_SELECT2 select, Matrix& U,
                         Matrix& T) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  T = A;
  U.resize(n, n);
  Vector wr(n), wi(n);
  lapack_int sdim = 0;
  const lapack_int info = LAPACKE_dgees(
      LAPACK_COL_MAJOR, 'V', 'S', select, n, T.data(), n, &sdim, wr.data(),
      wi.data(), U.data(), n);
  if (info != 0) {
    throw IllConditioned("ordered Schur decomposition failed (dgees info " +
                         std::to_string(info) + ")");
  }
  return sdim;
}

Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return K;
}

using ComplexMatrix = Eigen::MatrixXcd;

// Rank test of [A - lambda I, B] through the singular spectrum.
bool hautus_rank_deficient(const Matrix& A, const Matrix& B,
                           std::complex<double> lambda) {
  const Eigen::Index n = A.rows();
  ComplexMatrix pencil(n, n + B.cols());
  pencil.leftCols(n) = A.cast<std::complex<double>>();
  pencil.leftCols(n).diagonal().array() -= lambda;
  pencil.rightCols(B.cols()) = B.cast<std::complex<double>>();
  Eigen::JacobiSVD<ComplexMatrix> svd(pencil);
  const auto& sigma = svd.singularValues();
  const double sigma_max = sigma.maxCoeff();
  if (sigma_max == 0.0) return true;
  return sigma.minCoeff() <= 1e-9 * sigma_max;
}

// Stabilizing feedback for (A, B) assuming the Hautus test passed: relocate
// the spectrum at or right of -margin through a Riccati solve on the
// invariant block, leaving the strictly stable part untouched.
Matrix stabilizing_gain(const Matrix& A, const Matrix& B, double margin) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();

  g_select_threshold = -margin;
  Matrix U, T;
  const lapack_int k = ordered_schur(A, select_at_or_above_threshold, U, T);
  if (k == 0) return Matrix::Zero(m, n);

  const Matrix T11 = T.topLeftCorner(k, k);
  Matrix Y_u;  // rows spanning the left invariant subspace of the block
  if (k == n) {
    Y_u = U.transpose();
  } else {
    const Matrix T12 = T.topRightCorner(k, n - k);
    const Matrix T22 = T.bottomRightCorner(n - k, n - k);
    // T11 Z - Z T22 = -T12, solvable since the spectra are separated.
    const Matrix S = kron(Matrix::Identity(n - k, n - k), T11) -
                     kron(T22.transpose(), Matrix::Identity(k, k));
    const Vector rhs = -Eigen::Map<const Vector>(T12.data(), T12.size());
    const Vector z = S.partialPivLu().solve(rhs);
    const Matrix Z = Eigen::Map<const Matrix>(z.data(), k, n - k);
    Y_u = U.leftCols(k).transpose() - Z * U.rightCols(n - k).transpose();
  }

  const Matrix B_u = Y_u * B;
  const Matrix P_u = detail::care_schur(T11, Matrix(B_u * B_u.transpose()),
                                        Matrix::Identity(k, k));
  return -B_u.transpose() * P_u * Y_u;
}

StabilizabilityCertificate hautus_certificate(const Matrix& A,
                                              const Matrix& B,
                                              bool with_witness) {
  if (B.rows() != A.rows()) {
    throw DimensionMismatch("input map row count must match the state "
                            "dimension");
  }
  if (A.rows() != A.cols()) {
    throw DimensionMismatch("state matrix must be square");
  }
  StabilizabilityCertificate cert;
  const double margin = 1e-10 * (1.0 + A.norm());

  Eigen::EigenSolver<Matrix> es(A, false);
  if (es.info() != Eigen::Success) {
    throw EigenFailure("eigenvalue computation failed");
  }
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const std::complex<double> lambda = es.eigenvalues()(i);
    if (lambda.real() < -margin) continue;
    if (hautus_rank_deficient(A, B, lambda)) {
      cert.verdict = false;
      cert.offending_eigenvalue = lambda;
      return cert;
    }
  }
  cert.verdict = true;
  if (with_witness) {
    cert.witness_gain = stabilizing_gain(A, B, margin);
    cert.has_witness = true;
  }
  return cert;
}

}  // namespace

namespace detail {

Matrix care_schur(const Matrix& A, const Matrix& G, const Matrix& H) {
  const Eigen::Index n = A.rows();
  Matrix Z(2 * n, 2 * n);
  Z.topLeftCorner(n, n) = A;
  Z.topRightCorner(n, n) = -G;
  Z.bottomLeftCorner(n, n) = -H;
  Z.bottomRightCorner(n, n) = -A.transpose();

  Matrix U, T;
  const lapack_int sdim = ordered_schur(Z, select_strictly_stable, U, T);
  if (sdim != n) {
    throw IllConditioned("extremal pencil has " + std::to_string(sdim) +
                         " strictly stable eigenvalues, expected " +
                         std::to_string(n));
  }
  const Matrix X1 = U.topLeftCorner(n, n);
  const Matrix X2 = U.bottomLeftCorner(n, n);
  // P X1 = X2, i.e. X1^T P^T = X2^T.
  Eigen::PartialPivLU<Matrix> lu(X1.transpose());
  const Matrix P = lu.solve(X2.transpose()).transpose();
  if ((X1.transpose() * P.transpose() - X2.transpose()).norm() >
      1e-8 * (1.0 + X2.norm())) {
    throw IllConditioned("stable invariant subspace has a singular leading "
                         "block");
  }
  return symmetrize(P);
}

}  // namespace detail

double spectral_abscissa(const Matrix& A) {
  if (A.rows() != A.cols()) {
    throw DimensionMismatch("spectral abscissa needs a square matrix");
  }
  Eigen::EigenSolver<Matrix> es(A, false);
  if (es.info() != Eigen::Success) {
    throw EigenFailure("eigenvalue computation failed");
  }
  return es.eigenvalues().real().maxCoeff();
}

RiccatiSolution solve_care(const Matrix& A, const Matrix& B, const Matrix& C,
                           const Matrix& Q) {
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
  if (!check_stabilizability(A, B, false).verdict) {
    throw NotStabilizable("system is not stabilizable");
  }
  if (!check_detectability(A, C, false).verdict) {
    throw NotDetectable("system is not detectable");
  }

  const Matrix G = B * Q_llt.solve(Matrix(B.transpose()));
  const Matrix H = C.transpose() * C;

  const auto residual = [&](const Matrix& P) {
    return (A.transpose() * P + P * A - P * G * P + H).norm();
  };

  Matrix P = detail::care_schur(A, G, H);
  double res = residual(P);
  // Newton refinement: each sweep solves the closed-loop Lyapunov equation
  //   (A - G P)^T X + X (A - G P) = -(H + P G P),
  // keeping the result only while it actually improves the residual.
  for (int sweep = 0; sweep < 5; ++sweep) {
    if (res <= 1e-13 * (1.0 + P.norm())) break;
    const Matrix A_k = A - G * P;
    Matrix rhs = -(H + P * G * P);
    Matrix P_next;
    try {
      P_next = solve_lyapunov(Matrix(A_k.transpose()), symmetrize(rhs)).E;
    } catch (const Error&) {
      break;  // keep the Schur solution; the final tolerance gate decides
    }
    P_next = symmetrize(P_next);
    const double res_next = residual(P_next);
    if (res_next >= res) break;
    P = P_next;
    res = res_next;
  }

  if (res > 1e-9 * (1.0 + P.norm() * P.norm())) {
    throw NoConvergence("Riccati residual " + std::to_string(res) +
                        " exceeds tolerance after refinement");
  }

  RiccatiSolution sol;
  sol.P = P;
  sol.A_cl = A - G * P;
  const double abscissa = spectral_abscissa(sol.A_cl);
  if (abscissa >= 0.0) {
    throw IllConditioned("computed solution is not stabilizing");
  }
  sol.nu = -abscissa;
  sol.residual_norm = res;
  return sol;
}

LyapunovSolution solve_lyapunov(const Matrix& A_cl, const Matrix& W) {
  const Eigen::Index n = A_cl.rows();
  if (A_cl.cols() != n) {
    throw DimensionMismatch("closed-loop matrix must be square");
  }
  require_shape(W, n, n, "forcing");
  require_symmetric(W, "forcing");
  if (n > 200) {
    throw InvalidArgument("dense Lyapunov solves are capped at dimension "
                          "200, got " +
                          std::to_string(n));
  }
  if (spectral_abscissa(A_cl) >= 0.0) {
    throw NotHurwitz("closed-loop matrix must have its spectrum in the open "
                     "left half plane");
  }

  LyapunovSolution sol;
  if (n <= 64) {
    // Vectorized form: (I (x) A + A (x) I) vec(E) = vec(W).
    const Matrix I = Matrix::Identity(n, n);
    const Matrix K = kron(I, A_cl) + kron(A_cl, I);
    const Vector w = Eigen::Map<const Vector>(W.data(), W.size());
    const Vector e = K.partialPivLu().solve(w);
    sol.E = Eigen::Map<const Matrix>(e.data(), n, n);
  } else {
    // Complex-Schur reduction: with A = U T U^H and Y = U^H E U the
    // equation becomes T Y + Y T^H = U^H W U, solved column by column from
    // the last (each step is one shifted triangular solve).
    Eigen::ComplexSchur<Matrix> schur(A_cl);
    if (schur.info() != Eigen::Success) {
      throw EigenFailure("complex Schur decomposition failed");
    }
    const ComplexMatrix U = schur.matrixU();
    const ComplexMatrix T = schur.matrixT();
    const ComplexMatrix G = U.adjoint() * W.cast<std::complex<double>>() * U;
    ComplexMatrix Y = ComplexMatrix::Zero(n, n);
    for (Eigen::Index j = n - 1; j >= 0; --j) {
      Eigen::VectorXcd rhs = G.col(j);
      for (Eigen::Index k = j + 1; k < n; ++k) {
        rhs -= std::conj(T(j, k)) * Y.col(k);
      }
      ComplexMatrix shifted = T;
      shifted.diagonal().array() += std::conj(T(j, j));
      Y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
    }
    sol.E = (U * Y * U.adjoint()).real();
  }
  sol.E = symmetrize(sol.E);
  sol.residual_norm =
      (A_cl * sol.E + sol.E * A_cl.transpose() - W).norm();
  return sol;
}

StabilizabilityCertificate check_stabilizability(const Matrix& A,
                                                 const Matrix& B,
                                                 bool with_witness) {
  return hautus_certificate(A, B, with_witness);
}

StabilizabilityCertificate check_detectability(const Matrix& A,
                                               const Matrix& C,
                                               bool with_witness) {
  return hautus_certificate(Matrix(A.transpose()), Matrix(C.transpose()),
                            with_witness);
}

}  // namespace turnpike
