#include <benchmark/benchmark.h>

#include "turnpike/horizon.hpp"
#include "turnpike/model_zoo.hpp"
#include "turnpike/periodic.hpp"
#include "turnpike/riccati.hpp"

namespace {

using turnpike::Matrix;

// Hurwitz bidiagonal test matrix, deterministic in n.
Matrix stable_band(int n) {
  Matrix A = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = -0.5 - 0.01 * i;
    if (i + 1 < n) A(i, i + 1) = 0.2;
  }
  return A;
}

void BM_care(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix A = stable_band(n);
  const Matrix B = Matrix::Ones(n, 1);
  const Matrix C = Matrix::Identity(n, n);
  const Matrix Q = Matrix::Identity(1, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(turnpike::solve_care(A, B, C, Q));
  }
}
BENCHMARK(BM_care)->Arg(4)->Arg(16)->Arg(64);

void BM_lyapunov(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix A = stable_band(n);
  const Matrix W = Matrix::Identity(n, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(turnpike::solve_lyapunov(A, W));
  }
}
BENCHMARK(BM_lyapunov)->Arg(4)->Arg(16)->Arg(64);

void BM_horizon_dichotomy(benchmark::State& state) {
  const auto prob = turnpike::double_integrator_circle();
  for (auto _ : state) {
    benchmark::DoNotOptimize(turnpike::solve_horizon_dichotomy(prob, 20.0,
                                                               2000));
  }
}
BENCHMARK(BM_horizon_dichotomy);

void BM_horizon_direct(benchmark::State& state) {
  const auto prob = turnpike::double_integrator_circle();
  for (auto _ : state) {
    benchmark::DoNotOptimize(turnpike::solve_horizon_direct(prob, 20.0,
                                                            2000));
  }
}
BENCHMARK(BM_horizon_direct);

void BM_periodic_orbit(benchmark::State& state) {
  const auto prob = turnpike::double_integrator_circle();
  const auto care = turnpike::solve_care(prob.A, prob.B, prob.C, prob.Q);
  const Matrix G = prob.B * prob.Q.inverse() * prob.B.transpose();
  const auto lyap = turnpike::solve_lyapunov(care.A_cl, G);
  for (auto _ : state) {
    benchmark::DoNotOptimize(turnpike::solve_periodic(prob, care, lyap, 200));
  }
}
BENCHMARK(BM_periodic_orbit);

}  // namespace

BENCHMARK_MAIN();
