#pragma once

#include "turnpike/model_zoo.hpp"
#include "turnpike/nonlinear.hpp"

namespace turnpike {

// Wraps a linear-quadratic tracking instance with constant targets as a
// NonlinearModel (f = B u, quadratic cost), with analytic derivatives.
// The nonlinear pipeline degenerates exactly to the LQ one on this model.
NonlinearModel lq_model(const Matrix& A, const Matrix& B, const Matrix& C,
                        const Matrix& Q, const Vector& y_d, const Vector& u_d);

// Scalar cubic ODE y' = -y - y^3 + u with cost
// f0 = (y - y_target)^2 / 2 + u^2 / 2. Analytic derivatives throughout.
NonlinearModel cubic_scalar_model(double y_target);

// Spectral Galerkin surrogate of the cubic heat equation
//   y_t = y_xx - y^3 + control on the first m_controls modes
// on (0, 1) with Dirichlet ends, reduced to n_modes sine modes. The cubic
// term is projected by composite Simpson quadrature on a fixed grid.
// Cost f0 = ||y - y_target||^2 / 2 + ||u||^2 / 2 in coefficient space with
// y_target = amplitude * e_1. First derivatives analytic; second derivatives
// of the cubic term analytic as well.
NonlinearModel cubic_heat_modes(int n_modes, int m_controls,
                                double target_amplitude = 0.05);

}  // namespace turnpike
