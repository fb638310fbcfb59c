#include "turnpike/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

#include "turnpike/errors.hpp"

namespace turnpike {

Matrix symmetrize(const Matrix& M) {
  return 0.5 * (M + M.transpose());
}

void require_shape(const Matrix& M, Eigen::Index rows, Eigen::Index cols,
                   const char* name) {
  if (M.rows() != rows || M.cols() != cols) {
    throw DimensionMismatch(std::string(name) + " must be " +
                            std::to_string(rows) + "x" + std::to_string(cols) +
                            ", got " + std::to_string(M.rows()) + "x" +
                            std::to_string(M.cols()));
  }
}

void require_symmetric(const Matrix& M, const char* name) {
  if (M.rows() != M.cols()) {
    throw DimensionMismatch(std::string(name) + " must be square");
  }
  const double tol = 1e-10 * std::max(1.0, M.norm());
  if ((M - M.transpose()).norm() > tol) {
    throw InvalidArgument(std::string(name) + " must be symmetric");
  }
}

Matrix expm(const Matrix& M) {
  if (M.rows() != M.cols()) {
    throw DimensionMismatch("matrix exponential needs a square matrix");
  }
  const Matrix E = M.exp();
  if (!E.allFinite()) {
    throw ExpOverflow("matrix exponential overflowed");
  }
  return E;
}

Matrix matrix_power(const Matrix& M, long k) {
  if (M.rows() != M.cols()) {
    throw DimensionMismatch("matrix power needs a square matrix");
  }
  if (k < 0) {
    throw InvalidArgument("matrix power exponent must be nonnegative");
  }
  Matrix result = Matrix::Identity(M.rows(), M.cols());
  Matrix base = M;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

Matrix psd_sqrt(const Matrix& M, double clip_tol) {
  require_symmetric(M, "psd_sqrt input");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(M));
  if (es.info() != Eigen::Success) {
    throw EigenFailure("symmetric eigendecomposition failed");
  }
  Vector d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) < -clip_tol) {
      throw InvalidArgument("matrix has an eigenvalue below the clip "
                            "tolerance: " +
                            std::to_string(d(i)));
    }
    d(i) = std::sqrt(std::max(d(i), 0.0));
  }
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

Matrix spd_inverse_sqrt(const Matrix& M) {
  require_symmetric(M, "spd_inverse_sqrt input");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(M));
  if (es.info() != Eigen::Success) {
    throw EigenFailure("symmetric eigendecomposition failed");
  }
  const Vector d = es.eigenvalues();
  if (d.minCoeff() <= 0.0) {
    throw InvalidArgument("matrix is not positive definite");
  }
  return es.eigenvectors() * d.cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace turnpike
