#pragma once

#include <complex>

#include "turnpike/linalg.hpp"

namespace turnpike {

// Stabilizing solution of A^T P + P A - P B Q^{-1} B^T P + C^T C = 0.
struct RiccatiSolution {
  Matrix P;              // symmetric, positive semidefinite
  Matrix A_cl;           // A - B Q^{-1} B^T P, Hurwitz
  double nu = 0.0;       // |max Re lambda(A_cl)|, the closed-loop decay rate
  double residual_norm = 0.0;  // Frobenius norm of the Riccati residual
};

// Solution of the closed-loop Lyapunov equation A_cl E + E A_cl^T = W.
struct LyapunovSolution {
  Matrix E;              // symmetric; negative semidefinite when W >= 0
  double residual_norm = 0.0;
};

struct StabilizabilityCertificate {
  bool verdict = false;
  bool has_witness = false;
  Matrix witness_gain;   // K with A + B K Hurwitz (A^T + C^T K for detectability)
  std::complex<double> offending_eigenvalue{0.0, 0.0};  // set when verdict is false
};

// Stable-subspace (ordered Schur) solve of the tracking Riccati equation,
// followed by Newton-Kleinman refinement sweeps until the residual is at
// machine level. Preconditions (stabilizability of (A,B), detectability of
// (A,C), invertible Q) are checked up front.
RiccatiSolution solve_care(const Matrix& A, const Matrix& B, const Matrix& C,
                           const Matrix& Q);

// Solves A_cl E + E A_cl^T = W for Hurwitz A_cl and symmetric W.
// Kronecker vectorization with a dense LU for n <= 64; complex-Schur
// back-substitution (Bartels-Stewart) for 64 < n <= 200.
LyapunovSolution solve_lyapunov(const Matrix& A_cl, const Matrix& W);

// max over eigenvalues of Re lambda(A).
double spectral_abscissa(const Matrix& A);

// Hautus test: every eigenvalue of A with Re lambda >= 0 must satisfy
// rank [A - lambda I, B] = n. When the verdict is true and with_witness is
// set, a feedback K with A + B K Hurwitz is constructed by relocating only
// the unstable modes (LQ pole relocation on the unstable Schur block).
StabilizabilityCertificate check_stabilizability(const Matrix& A,
                                                 const Matrix& B,
                                                 bool with_witness = true);

// check_stabilizability(A^T, C^T): gain K makes A^T + C^T K Hurwitz.
StabilizabilityCertificate check_detectability(const Matrix& A,
                                               const Matrix& C,
                                               bool with_witness = true);

namespace detail {

// Stable-subspace CARE solve on the Hamiltonian [[A, -G], [-H, -A^T]]
// without precondition checks or refinement; G = B Q^{-1} B^T, H = C^T C.
// Used internally by the witness construction to avoid recursing through
// check_stabilizability.
Matrix care_schur(const Matrix& A, const Matrix& G, const Matrix& H);

}  // namespace detail

}  // namespace turnpike
