#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "turnpike/model_zoo.hpp"
#include "turnpike/periodic.hpp"
#include "turnpike/riccati.hpp"

namespace turnpike {

// Finite-horizon extremal trajectory on a uniform grid over [0, T].
struct Trajectory {
  Vector grid;    // N+1 times
  Matrix y;       // (N+1) x n
  Matrix lambda;  // (N+1) x n
  Matrix u;       // (N+1) x m
  double bvp_residual = 0.0;  // max of interior central-difference residual
                              // and boundary gaps
};

// The 2n x 2n system that couples the contracting initial value v(0) to the
// expanding terminal value w(T):
//   [[I, -E S_T^T], [-P S_T, I + P E]] (v0; wT) = (delta_y(0); delta_lambda(T)).
// Off-diagonal blocks decay like e^{-nu T}, so K approaches the identity for
// long horizons.
struct BoundaryCoupling {
  Matrix K;
  Vector rhs;
  Vector solution;  // (v0; wT)
};

BoundaryCoupling build_boundary_coupling(const Matrix& P, const Matrix& E,
                                         const Matrix& S_T, const Vector& dy0,
                                         const Vector& dlT);

// Decoupled solve: computes the periodic turnpike, forms the deviation
// boundary data delta_y(0) = y0 - y_pi(0), delta_lambda(T) = -lambda_pi(T),
// solves the boundary coupling for (v0, wT), propagates v forward and w
// backward with the exact one-step propagator e^{dt A_cl}, and maps back
// through the inverse dichotomy blocks.
Trajectory solve_horizon_dichotomy(const LqProblem& problem, double T, int N);

// Independent check: Crank-Nicolson discretization of the coupled extremal
// equations with boundary conditions y(0) = y0 and lambda(T) = 0, solved in
// the numerically stable order by eliminating the costate against the state
// backward in time (lambda_k = S_k y_k + s_k) and substituting forward. A
// post-solve residual on the assembled one-step equations guards the
// elimination.
Trajectory solve_horizon_direct(const LqProblem& problem, double T, int N);

// Homogeneous extremal system with random boundary data (y(0), lambda(T))
// drawn once from the seeded generator and reused for every horizon. For
// each T returns r(T) = (||y(T)|| + ||lambda(0)||) / (||y(0)|| + ||lambda(T)||),
// the quantity whose boundedness uniformly in T certifies the two-point
// a-priori estimate.
std::vector<std::pair<double, double>> check_stability_estimate(
    const LqProblem& problem, const std::vector<double>& T_list,
    int samples_per_unit_time = 200, std::uint64_t seed = 0);

// Header `t,y_1..y_n,lambda_1..lambda_n,u_1..u_m`, one row per grid point,
// 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace turnpike
