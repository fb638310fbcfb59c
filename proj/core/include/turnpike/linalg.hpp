#pragma once

#include <Eigen/Dense>

#include "turnpike/errors.hpp"

namespace turnpike {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// (M + M^T) / 2. Symmetry repairs after floating-point products keep the
// symmetric solvers on the symmetric branch.
Matrix symmetrize(const Matrix& M);

// Throws DimensionMismatch unless M is rows x cols; `name` labels the message.
void require_shape(const Matrix& M, Eigen::Index rows, Eigen::Index cols,
                   const char* name);

// Throws DimensionMismatch unless ||M - M^T||_F <= 1e-10 * max(1, ||M||_F).
void require_symmetric(const Matrix& M, const char* name);

// e^M via scaling-and-squaring. Throws ExpOverflow if the result is not
// entirely finite.
Matrix expm(const Matrix& M);

// M^k for k >= 0 by binary exponentiation.
Matrix matrix_power(const Matrix& M, long k);

// Symmetric positive semidefinite square root via eigendecomposition.
// Eigenvalues in [-clip_tol, 0] count as zero; anything below -clip_tol
// throws InvalidArgument (callers translate to their own error type after
// checking the spectrum themselves when they need a specific diagnosis).
Matrix psd_sqrt(const Matrix& M, double clip_tol);

// Inverse symmetric square root of a positive definite matrix; throws
// InvalidArgument if the smallest eigenvalue is not strictly positive.
Matrix spd_inverse_sqrt(const Matrix& M);

}  // namespace turnpike
