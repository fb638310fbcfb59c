#include "turnpike/nonlinear_models.hpp"

#include <cmath>
#include <memory>

#include "turnpike/errors.hpp"

namespace turnpike {

NonlinearModel lq_model(const Matrix& A, const Matrix& B, const Matrix& C,
                        const Matrix& Q, const Vector& y_d,
                        const Vector& u_d) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  if (A.cols() != n) throw DimensionMismatch("state matrix must be square");
  require_shape(B, n, m, "input map");
  if (C.cols() != n) {
    throw DimensionMismatch("observation map must have one column per state");
  }
  require_shape(Q, m, m, "control weight");
  if (y_d.size() != n || u_d.size() != m) {
    throw DimensionMismatch("targets must match the state and control "
                            "dimensions");
  }

  NonlinearModel model;
  model.n = n;
  model.m = m;
  model.A = A;
  const Matrix H = C.transpose() * C;

  model.f = [B](const Vector&, const Vector& u) { return (B * u).eval(); };
  model.f0 = [H, Q, y_d, u_d](const Vector& y, const Vector& u) {
    const Vector dy = y - y_d;
    const Vector du = u - u_d;
    return 0.5 * dy.dot(H * dy) + 0.5 * du.dot(Q * du);
  };
  model.f_y = [n](const Vector&, const Vector&) {
    return Matrix::Zero(n, n).eval();
  };
  model.f_u = [B](const Vector&, const Vector&) { return B; };
  model.f0_y = [H, y_d](const Vector& y, const Vector&) {
    return (H * (y - y_d)).eval();
  };
  model.f0_u = [Q, u_d](const Vector&, const Vector& u) {
    return (Q * (u - u_d)).eval();
  };
  model.lambda_f_yy = [n](const Vector&, const Vector&, const Vector&) {
    return Matrix::Zero(n, n).eval();
  };
  model.lambda_f_yu = [n, m](const Vector&, const Vector&, const Vector&) {
    return Matrix::Zero(n, m).eval();
  };
  model.lambda_f_uu = [m](const Vector&, const Vector&, const Vector&) {
    return Matrix::Zero(m, m).eval();
  };
  model.f0_yy = [H](const Vector&, const Vector&) { return H; };
  model.f0_yu = [n, m](const Vector&, const Vector&) {
    return Matrix::Zero(n, m).eval();
  };
  model.f0_uu = [Q](const Vector&, const Vector&) { return Q; };
  return model;
}

NonlinearModel cubic_scalar_model(double y_target) {
  NonlinearModel model;
  model.n = 1;
  model.m = 1;
  model.A = Matrix::Constant(1, 1, -1.0);

  model.f = [](const Vector& y, const Vector& u) {
    return Vector::Constant(1, -y(0) * y(0) * y(0) + u(0)).eval();
  };
  model.f0 = [y_target](const Vector& y, const Vector& u) {
    const double dy = y(0) - y_target;
    return 0.5 * dy * dy + 0.5 * u(0) * u(0);
  };
  model.f_y = [](const Vector& y, const Vector&) {
    return Matrix::Constant(1, 1, -3.0 * y(0) * y(0)).eval();
  };
  model.f_u = [](const Vector&, const Vector&) {
    return Matrix::Identity(1, 1).eval();
  };
  model.f0_y = [y_target](const Vector& y, const Vector&) {
    return Vector::Constant(1, y(0) - y_target).eval();
  };
  model.f0_u = [](const Vector&, const Vector& u) {
    return Vector::Constant(1, u(0)).eval();
  };
  model.lambda_f_yy = [](const Vector& y, const Vector&, const Vector& l) {
    return Matrix::Constant(1, 1, -6.0 * y(0) * l(0)).eval();
  };
  model.lambda_f_yu = [](const Vector&, const Vector&, const Vector&) {
    return Matrix::Zero(1, 1).eval();
  };
  model.lambda_f_uu = [](const Vector&, const Vector&, const Vector&) {
    return Matrix::Zero(1, 1).eval();
  };
  model.f0_yy = [](const Vector&, const Vector&) {
    return Matrix::Identity(1, 1).eval();
  };
  model.f0_yu = [](const Vector&, const Vector&) {
    return Matrix::Zero(1, 1).eval();
  };
  model.f0_uu = [](const Vector&, const Vector&) {
    return Matrix::Identity(1, 1).eval();
  };
  return model;
}

namespace {

// Fixed quadrature data for the sine-Galerkin cubic term: mode samples and
// composite Simpson weights on a uniform grid over (0, 1).
struct SineQuadrature {
  Matrix modes;     // n x (M+1), modes(k, i) = sqrt(2) sin((k+1) pi x_i)
  Vector weights;   // Simpson weights, sum = 1
};

std::shared_ptr<const SineQuadrature> make_quadrature(int n_modes) {
  const int M = 256;  // intervals; even, so composite Simpson applies
  auto quad = std::make_shared<SineQuadrature>();
  quad->modes.resize(n_modes, M + 1);
  quad->weights.resize(M + 1);
  const double dx = 1.0 / M;
  for (int i = 0; i <= M; ++i) {
    const double x = i * dx;
    for (int k = 0; k < n_modes; ++k) {
      quad->modes(k, i) = std::sqrt(2.0) * std::sin((k + 1) * M_PI * x);
    }
    double w = (i == 0 || i == M) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    quad->weights(i) = w * dx / 3.0;
  }
  return quad;
}

}  // namespace

NonlinearModel cubic_heat_modes(int n_modes, int m_controls,
                                double target_amplitude) {
  if (n_modes < 1 || m_controls < 1 || m_controls > n_modes) {
    throw InvalidArgument("need 1 <= m_controls <= n_modes");
  }
  const Eigen::Index n = n_modes;
  const Eigen::Index m = m_controls;

  NonlinearModel model;
  model.n = n;
  model.m = m;
  model.A = Matrix::Zero(n, n);
  for (int k = 1; k <= n_modes; ++k) {
    model.A(k - 1, k - 1) = -(k * M_PI) * (k * M_PI);
  }
  Matrix E = Matrix::Zero(n, m);
  E.topRows(m) = Matrix::Identity(m, m);
  Vector y_t = Vector::Zero(n);
  y_t(0) = target_amplitude;
  const auto quad = make_quadrature(n_modes);

  // w(x) = sum_k y_k phi_k(x); the cubic term projects w^3 back onto the
  // modes through the fixed Simpson rule.
  model.f = [quad, E](const Vector& y, const Vector& u) {
    const Vector w = quad->modes.transpose() * y;
    const Vector integrand = quad->weights.cwiseProduct(
        w.array().cube().matrix());
    return (-(quad->modes * integrand) + E * u).eval();
  };
  model.f0 = [y_t](const Vector& y, const Vector& u) {
    return 0.5 * (y - y_t).squaredNorm() + 0.5 * u.squaredNorm();
  };
  model.f_y = [quad](const Vector& y, const Vector&) {
    const Vector w = quad->modes.transpose() * y;
    const Vector d = quad->weights.cwiseProduct(
        (3.0 * w.array().square()).matrix());
    return (-(quad->modes * d.asDiagonal() * quad->modes.transpose()))
        .eval();
  };
  model.f_u = [E](const Vector&, const Vector&) { return E; };
  model.f0_y = [y_t](const Vector& y, const Vector&) {
    return (y - y_t).eval();
  };
  model.f0_u = [](const Vector&, const Vector& u) { return u; };
  model.lambda_f_yy = [quad](const Vector& y, const Vector&,
                             const Vector& l) {
    const Vector w = quad->modes.transpose() * y;
    const Vector lw = quad->modes.transpose() * l;
    const Vector d = quad->weights.cwiseProduct(
        (6.0 * w.array() * lw.array()).matrix());
    return (-(quad->modes * d.asDiagonal() * quad->modes.transpose()))
        .eval();
  };
  model.lambda_f_yu = [n, m](const Vector&, const Vector&, const Vector&) {
    return Matrix::Zero(n, m).eval();
  };
  model.lambda_f_uu = [m](const Vector&, const Vector&, const Vector&) {
    return Matrix::Zero(m, m).eval();
  };
  model.f0_yy = [n](const Vector&, const Vector&) {
    return Matrix::Identity(n, n).eval();
  };
  model.f0_yu = [n, m](const Vector&, const Vector&) {
    return Matrix::Zero(n, m).eval();
  };
  model.f0_uu = [m](const Vector&, const Vector&) {
    return Matrix::Identity(m, m).eval();
  };
  return model;
}

}  // namespace turnpike
