#include "turnpike/nonlinear.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "turnpike/errors.hpp"

namespace turnpike {
namespace {

double fd_step(double x) {
  static const double base =
      std::cbrt(std::numeric_limits<double>::epsilon());
  return base * (1.0 + std::abs(x));
}

// Effective derivative evaluators: the model's analytic ones when present,
// central finite differences otherwise. Second derivatives difference the
// effective first derivatives, so an analytic first derivative sharpens the
// fallback second derivative too.
struct Evaluators {
  const NonlinearModel& model;

  Matrix f_y(const Vector& y, const Vector& u) const {
    if (model.f_y) return model.f_y(y, u);
    Matrix J(model.n, model.n);
    for (Eigen::Index j = 0; j < model.n; ++j) {
      Vector yp = y, ym = y;
      const double h = fd_step(y(j));
      yp(j) += h;
      ym(j) -= h;
      J.col(j) = (model.f(yp, u) - model.f(ym, u)) / (2.0 * h);
    }
    return J;
  }
  Matrix f_u(const Vector& y, const Vector& u) const {
    if (model.f_u) return model.f_u(y, u);
    Matrix J(model.n, model.m);
    for (Eigen::Index j = 0; j < model.m; ++j) {
      Vector up = u, um = u;
      const double h = fd_step(u(j));
      up(j) += h;
      um(j) -= h;
      J.col(j) = (model.f(y, up) - model.f(y, um)) / (2.0 * h);
    }
    return J;
  }
  Vector f0_y(const Vector& y, const Vector& u) const {
    if (model.f0_y) return model.f0_y(y, u);
    Vector g(model.n);
    for (Eigen::Index j = 0; j < model.n; ++j) {
      Vector yp = y, ym = y;
      const double h = fd_step(y(j));
      yp(j) += h;
      ym(j) -= h;
      g(j) = (model.f0(yp, u) - model.f0(ym, u)) / (2.0 * h);
    }
    return g;
  }
  Vector f0_u(const Vector& y, const Vector& u) const {
    if (model.f0_u) return model.f0_u(y, u);
    Vector g(model.m);
    for (Eigen::Index j = 0; j < model.m; ++j) {
      Vector up = u, um = u;
      const double h = fd_step(u(j));
      up(j) += h;
      um(j) -= h;
      g(j) = (model.f0(y, up) - model.f0(y, um)) / (2.0 * h);
    }
    return g;
  }

  Matrix lambda_f_yy(const Vector& y, const Vector& u,
                     const Vector& l) const {
    if (model.lambda_f_yy) return model.lambda_f_yy(y, u, l);
    Matrix Hm(model.n, model.n);
    for (Eigen::Index j = 0; j < model.n; ++j) {
      Vector yp = y, ym = y;
      const double h = fd_step(y(j));
      yp(j) += h;
      ym(j) -= h;
      Hm.col(j) =
          (f_y(yp, u).transpose() * l - f_y(ym, u).transpose() * l) /
          (2.0 * h);
    }
    return Hm;
  }
  // Mixed block, laid out n x m: entry (i, j) differentiates in y_i and u_j.
  Matrix lambda_f_yu(const Vector& y, const Vector& u,
                     const Vector& l) const {
    if (model.lambda_f_yu) return model.lambda_f_yu(y, u, l);
    Matrix Hm(model.n, model.m);
    for (Eigen::Index j = 0; j < model.m; ++j) {
      Vector up = u, um = u;
      const double h = fd_step(u(j));
      up(j) += h;
      um(j) -= h;
      Hm.col(j) =
          (f_y(y, up).transpose() * l - f_y(y, um).transpose() * l) /
          (2.0 * h);
    }
    return Hm;
  }
  Matrix lambda_f_uu(const Vector& y, const Vector& u,
                     const Vector& l) const {
    if (model.lambda_f_uu) return model.lambda_f_uu(y, u, l);
    Matrix Hm(model.m, model.m);
    for (Eigen::Index j = 0; j < model.m; ++j) {
      Vector up = u, um = u;
      const double h = fd_step(u(j));
      up(j) += h;
      um(j) -= h;
      Hm.col(j) =
          (f_u(y, up).transpose() * l - f_u(y, um).transpose() * l) /
          (2.0 * h);
    }
    return Hm;
  }

  Matrix f0_yy(const Vector& y, const Vector& u) const {
    if (model.f0_yy) return model.f0_yy(y, u);
    Matrix Hm(model.n, model.n);
    for (Eigen::Index j = 0; j < model.n; ++j) {
      Vector yp = y, ym = y;
      const double h = fd_step(y(j));
      yp(j) += h;
      ym(j) -= h;
      Hm.col(j) = (f0_y(yp, u) - f0_y(ym, u)) / (2.0 * h);
    }
    return Hm;
  }
  Matrix f0_yu(const Vector& y, const Vector& u) const {
    if (model.f0_yu) return model.f0_yu(y, u);
    Matrix Hm(model.n, model.m);
    for (Eigen::Index j = 0; j < model.m; ++j) {
      Vector up = u, um = u;
      const double h = fd_step(u(j));
      up(j) += h;
      um(j) -= h;
      Hm.col(j) = (f0_y(y, up) - f0_y(y, um)) / (2.0 * h);
    }
    return Hm;
  }
  Matrix f0_uu(const Vector& y, const Vector& u) const {
    if (model.f0_uu) return model.f0_uu(y, u);
    Matrix Hm(model.m, model.m);
    for (Eigen::Index j = 0; j < model.m; ++j) {
      Vector up = u, um = u;
      const double h = fd_step(u(j));
      up(j) += h;
      um(j) -= h;
      Hm.col(j) = (f0_u(y, up) - f0_u(y, um)) / (2.0 * h);
    }
    return Hm;
  }
};

void require_model(const NonlinearModel& model) {
  if (model.n < 1 || model.m < 1) {
    throw InvalidArgument("model needs positive state and control "
                          "dimensions");
  }
  if (model.A.rows() != model.n || model.A.cols() != model.n) {
    throw DimensionMismatch("linear part must be n x n");
  }
  if (!model.f || !model.f0) {
    throw InvalidArgument("model must provide f and f0");
  }
}

// Stacked steady residual (A y + f; -A^T l - H_y; H_u) in the variables
// (y, u, lambda), with H(y, l, u) = <l, f(y,u)> - f0(y,u).
Vector steady_residual(const Evaluators& ev, const Vector& y, const Vector& u,
                       const Vector& l) {
  const auto& model = ev.model;
  Vector F(2 * model.n + model.m);
  F.head(model.n) = model.A * y + model.f(y, u);
  F.segment(model.n, model.n) =
      -model.A.transpose() * l - (ev.f_y(y, u).transpose() * l -
                                  ev.f0_y(y, u));
  F.tail(model.m) = ev.f_u(y, u).transpose() * l - ev.f0_u(y, u);
  return F;
}

Matrix steady_jacobian(const Evaluators& ev, const Vector& y, const Vector& u,
                       const Vector& l) {
  const auto& model = ev.model;
  const Eigen::Index n = model.n;
  const Eigen::Index m = model.m;
  const Matrix fy = ev.f_y(y, u);
  const Matrix fu = ev.f_u(y, u);
  const Matrix H_yy = ev.lambda_f_yy(y, u, l) - ev.f0_yy(y, u);
  const Matrix H_yu = ev.lambda_f_yu(y, u, l) - ev.f0_yu(y, u);
  const Matrix H_uu = ev.lambda_f_uu(y, u, l) - ev.f0_uu(y, u);

  Matrix J = Matrix::Zero(2 * n + m, 2 * n + m);
  J.block(0, 0, n, n) = model.A + fy;
  J.block(0, n, n, m) = fu;
  J.block(n, 0, n, n) = -H_yy;
  J.block(n, n, n, m) = -H_yu;
  J.block(n, n + m, n, n) = -(model.A + fy).transpose();
  J.block(n + n, 0, m, n) = H_yu.transpose();
  J.block(n + n, n, m, m) = H_uu;
  J.block(n + n, n + m, m, n) = fu.transpose();
  return J;
}

}  // namespace

SteadyTriple solve_static_nonlinear(const NonlinearModel& model,
                                    const Vector& y_guess,
                                    const Vector& u_guess,
                                    const Vector& lambda_guess) {
  require_model(model);
  if (y_guess.size() != model.n || lambda_guess.size() != model.n ||
      u_guess.size() != model.m) {
    throw DimensionMismatch("guess dimensions must match the model");
  }
  const Evaluators ev{model};
  const Eigen::Index n = model.n;
  const Eigen::Index m = model.m;

  Vector y = y_guess, u = u_guess, l = lambda_guess;
  Vector F = steady_residual(ev, y, u, l);
  double norm_F = F.norm();
  constexpr double tol = 1e-10;

  for (int iter = 0; iter < 50 && norm_F > tol; ++iter) {
    const Matrix J = steady_jacobian(ev, y, u, l);
    const Vector dx = J.partialPivLu().solve(-F);
    const double solve_scale =
        1.0 + norm_F + J.norm() * dx.norm();
    if (!dx.allFinite() || (J * dx + F).norm() > 1e-8 * solve_scale) {
      throw SingularJacobian("Newton system for the steady triple is "
                             "singular");
    }

    double alpha = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 30; ++halving) {
      const Vector y_new = y + alpha * dx.head(n);
      const Vector u_new = u + alpha * dx.segment(n, m);
      const Vector l_new = l + alpha * dx.tail(n);
      const Vector F_new = steady_residual(ev, y_new, u_new, l_new);
      const double norm_new = F_new.norm();
      if (std::isfinite(norm_new) && norm_new < norm_F) {
        y = y_new;
        u = u_new;
        l = l_new;
        F = F_new;
        norm_F = norm_new;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      throw NoConvergence("damped Newton stalled: no step length reduces "
                          "the steady residual (left at " +
                          std::to_string(norm_F) + ")");
    }
  }
  if (norm_F > tol) {
    throw NoConvergence("steady residual " + std::to_string(norm_F) +
                        " after 50 Newton iterations");
  }

  SteadyTriple triple;
  triple.y_s = y;
  triple.u_s = u;
  triple.lambda_s = l;
  triple.residual_norm = norm_F;
  return triple;
}

SaddleLinearization linearize(const NonlinearModel& model,
                              const SteadyTriple& triple) {
  require_model(model);
  const Evaluators ev{model};
  const Vector& y = triple.y_s;
  const Vector& u = triple.u_s;
  const Vector& l = triple.lambda_s;

  const Matrix fy = ev.f_y(y, u);
  const Matrix fu = ev.f_u(y, u);  // = H_lu
  const Matrix H_uu = symmetrize(ev.lambda_f_uu(y, u, l) - ev.f0_uu(y, u));
  const Matrix H_yy = symmetrize(ev.lambda_f_yy(y, u, l) - ev.f0_yy(y, u));
  const Matrix H_yu = ev.lambda_f_yu(y, u, l) - ev.f0_yu(y, u);

  const Matrix neg_H_uu = -H_uu;
  Eigen::SelfAdjointEigenSolver<Matrix> es(neg_H_uu);
  if (es.info() != Eigen::Success) {
    throw EigenFailure("eigenvalue computation of the control curvature "
                       "failed");
  }
  if (es.eigenvalues().minCoeff() <= 1e-10 * (1.0 + H_uu.norm())) {
    throw LegendreViolation("-H_uu must be positive definite at the steady "
                            "triple");
  }
  Eigen::LLT<Matrix> neg_llt(neg_H_uu);

  SaddleLinearization lin;
  // H_uu^{-1} = -neg_H_uu^{-1} turns every H_uu^{-1} term into a +solve.
  lin.cal_A = model.A + fy + fu * neg_llt.solve(H_yu.transpose());
  lin.W = symmetrize(fu * neg_llt.solve(Matrix(fu.transpose())));
  lin.CtC =
      symmetrize(-(H_yu * neg_llt.solve(H_yu.transpose())) - H_yy);

  Eigen::SelfAdjointEigenSolver<Matrix> es_c(lin.CtC);
  if (es_c.info() != Eigen::Success) {
    throw EigenFailure("eigenvalue computation of the reduced curvature "
                       "failed");
  }
  if (es_c.eigenvalues().minCoeff() < -1e-8) {
    throw IndefiniteCtC("reduced state curvature has an eigenvalue " +
                        std::to_string(es_c.eigenvalues().minCoeff()) +
                        " below the clip threshold");
  }
  lin.cal_C = psd_sqrt(lin.CtC, 1e-8);
  lin.B_w = fu * spd_inverse_sqrt(neg_H_uu);

  try {
    lin.local_rate = local_turnpike_rate(lin);
  } catch (const Error&) {
    lin.local_rate = std::numeric_limits<double>::quiet_NaN();
  }
  return lin;
}

double local_turnpike_rate(const SaddleLinearization& lin) {
  const Eigen::Index m = lin.B_w.cols();
  return solve_care(lin.cal_A, lin.B_w, lin.cal_C,
                    Matrix::Identity(m, m))
      .nu;
}

Matrix saddle_matrix(const SaddleLinearization& lin) {
  const Eigen::Index n = lin.cal_A.rows();
  Matrix M(2 * n, 2 * n);
  M.topLeftCorner(n, n) = lin.cal_A;
  M.topRightCorner(n, n) = lin.W;
  M.bottomLeftCorner(n, n) = lin.CtC;
  M.bottomRightCorner(n, n) = -lin.cal_A.transpose();
  return M;
}

}  // namespace turnpike
