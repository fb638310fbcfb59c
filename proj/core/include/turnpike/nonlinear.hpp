#pragma once

#include <functional>

#include "turnpike/linalg.hpp"
#include "turnpike/riccati.hpp"
#include "turnpike/static_turnpike.hpp"

namespace turnpike {

// Control-affine-or-not nonlinear problem
//   y' = A y + f(y, u),   running cost f0(y, u),
// with optional analytic derivative evaluators. Any evaluator left empty is
// replaced by central finite differences (step eps^(1/3) * (1 + |x_i|) per
// coordinate); second derivatives fall back to differences of the first
// derivatives, analytic or not.
struct NonlinearModel {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  Matrix A;

  std::function<Vector(const Vector&, const Vector&)> f;   // required
  std::function<double(const Vector&, const Vector&)> f0;  // required

  // First derivatives.
  std::function<Matrix(const Vector&, const Vector&)> f_y;   // n x n
  std::function<Matrix(const Vector&, const Vector&)> f_u;   // n x m
  std::function<Vector(const Vector&, const Vector&)> f0_y;  // n
  std::function<Vector(const Vector&, const Vector&)> f0_u;  // m

  // Second derivatives of f contracted with a costate vector:
  // lambda_f_yy(y,u,l)[i][j] = sum_k l_k d2 f_k / dy_i dy_j, and so on.
  std::function<Matrix(const Vector&, const Vector&, const Vector&)> lambda_f_yy;  // n x n
  std::function<Matrix(const Vector&, const Vector&, const Vector&)> lambda_f_yu;  // n x m
  std::function<Matrix(const Vector&, const Vector&, const Vector&)> lambda_f_uu;  // m x m

  // Second derivatives of the running cost.
  std::function<Matrix(const Vector&, const Vector&)> f0_yy;  // n x n
  std::function<Matrix(const Vector&, const Vector&)> f0_yu;  // n x m
  std::function<Matrix(const Vector&, const Vector&)> f0_uu;  // m x m
};

// Second-order data of the extremal system at a steady triple, after
// eliminating the control through the stationarity condition. With
// H(y, l, u) = <l, f(y,u)> - f0(y,u):
//   cal_A = A + H_ly - H_lu H_uu^{-1} H_uy
//   W     = H_lu (-H_uu)^{-1} H_ul            (symmetric, >= 0 under the
//                                              strong Legendre condition)
//   CtC   = H_yu H_uu^{-1} H_uy - H_yy        (assumed >= 0, checked)
//   cal_C = symmetric square root of CtC.
struct SaddleLinearization {
  Matrix cal_A;
  Matrix W;
  Matrix CtC;
  Matrix cal_C;
  Matrix B_w;  // cal_A-conformal input map with B_w B_w^T = W
  double local_rate = 0.0;  // NaN when stabilizability/detectability fail
};

// Damped Newton iteration on the stacked steady residual
//   (A y + f(y,u); -A^T l - H_y; H_u)
// from the supplied guess; residual tolerance 1e-10, cap 50 iterations,
// up to 30 backtracking halvings per step.
SteadyTriple solve_static_nonlinear(const NonlinearModel& model,
                                    const Vector& y_guess,
                                    const Vector& u_guess,
                                    const Vector& lambda_guess);

// Assembles the linearization at the triple. Throws LegendreViolation when
// -H_uu is not positive definite and IndefiniteCtC when CtC has an
// eigenvalue below -1e-8; eigenvalues in [-1e-8, 0] are clipped to zero in
// the cal_C factor.
SaddleLinearization linearize(const NonlinearModel& model,
                              const SteadyTriple& triple);

// Predicted local exponential turnpike rate: the closed-loop decay rate of
// the tracking Riccati problem (cal_A, B_w, cal_C, I). Throws
// NotStabilizable / NotDetectable when the respective Hautus test fails.
double local_turnpike_rate(const SaddleLinearization& lin);

// The 2n x 2n principal part of the linearized extremal system,
// [[cal_A, W], [CtC, -cal_A^T]]; its spectrum is symmetric under
// mu -> -conj(mu).
Matrix saddle_matrix(const SaddleLinearization& lin);

}  // namespace turnpike
