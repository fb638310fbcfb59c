#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "turnpike/linalg.hpp"

namespace turnpike {

enum class SignalKind { Constant, Sinusoid, Table };

// One coordinate of a sinusoid signal:
//   value(t) = offset + amplitude * cos(2*pi*harmonic*t/Pi + phase).
struct SinusoidComponent {
  double offset = 0.0;
  double amplitude = 0.0;
  int harmonic = 1;
  double phase = 0.0;
};

// Pi-periodic vector signal. Three kinds: a constant vector, per-component
// sinusoids, or tabulated samples on [0, Pi] extended periodically with
// linear interpolation.
struct SignalSpec {
  SignalKind kind = SignalKind::Constant;
  Vector constant;                            // Constant
  std::vector<SinusoidComponent> components;  // Sinusoid
  Vector table_times;                         // Table: ascending, 0 to Pi
  Matrix table_values;                        // Table: one row per sample time

  Eigen::Index dim() const;
  Vector eval(double t, double Pi) const;

  static SignalSpec make_constant(const Vector& v);
  static SignalSpec make_sinusoid(std::vector<SinusoidComponent> comps);
  static SignalSpec make_table(const Vector& times, const Matrix& values);
};

// One linear-quadratic tracking instance: dynamics (A, B), cost weights
// (C, Q), period Pi, periodic targets y_d, u_d, and the initial state y0.
struct LqProblem {
  std::string label;
  Matrix A, B, C, Q;
  double Pi = 1.0;
  Vector y0;
  SignalSpec y_d, u_d;
  std::map<std::string, std::vector<double>> metadata;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }
  Eigen::Index p() const { return C.rows(); }
  Vector y_d_at(double t) const { return y_d.eval(t, Pi); }
  Vector u_d_at(double t) const { return u_d.eval(t, Pi); }
};

// Dimension consistency, SPD of Q, signal periodicity. Throws
// ValidationError naming the offending field.
void validate_problem(const LqProblem& p);

// Planar circle tracking through a double integrator: A=[[0,1],[0,0]],
// B=[0;1], C=Q=I, y_d(t)=(cos 2 pi t, sin 2 pi t), u_d=0, Pi=1, y0=(0.1,0).
LqProblem double_integrator_circle();

// 1-D heat equation with potential a(x) on (0,1), Dirichlet ends,
// n interior nodes, control injected on the nodes in omega2 and tracking
// observed on omega1 (1-based node indices), both scaled by sqrt(h) so the
// discrete quadratic forms approximate the L2 integrals. y_d defaults to the
// first Dirichlet eigenvector of the discrete Laplacian modulated by
// sin(2 pi t / Pi).
LqProblem heat_1d(int n, const Vector& a, const std::vector<int>& omega1,
                  const std::vector<int>& omega2,
                  std::optional<SignalSpec> y_d = std::nullopt,
                  std::optional<SignalSpec> u_d = std::nullopt);

// 1-D wave equation as a first-order system on (position, velocity):
// A=[[0,I],[L,0]] with L the discrete Dirichlet Laplacian; control and
// observation act on velocity nodes. The energy mass weight h is recorded
// in metadata["energy_mass_weight"].
LqProblem wave_1d(int n, const std::vector<int>& omega1,
                  const std::vector<int>& omega2);

// JSON problem files; save/load round-trips bit-exactly.
LqProblem load_problem(const std::string& path);
void save_problem(const std::string& path, const LqProblem& p);

// Canonical instances by CLI name: "double-integrator", "heat", "wave".
LqProblem zoo_problem(const std::string& name);

}  // namespace turnpike
