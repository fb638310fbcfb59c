#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "turnpike/decay.hpp"
#include "turnpike/horizon.hpp"
#include "turnpike/model_zoo.hpp"
#include "turnpike/riccati.hpp"

using turnpike::Matrix;
using turnpike::Vector;

namespace {

turnpike::DeviationSeries synthetic_series(double c, double nu, double T,
                                           int N) {
  turnpike::DeviationSeries s;
  s.t = Vector::LinSpaced(N + 1, 0.0, T);
  s.d = Vector(N + 1);
  for (int k = 0; k <= N; ++k) {
    const double t = s.t(k);
    s.d(k) = c * (std::exp(-nu * t) + std::exp(-nu * (T - t)));
  }
  return s;
}

}  // namespace

TEST_CASE("decay: exact two-sided data is recovered") {
  const double T = 20.0;
  const auto series = synthetic_series(2.0, 0.9, T, 2000);
  const auto fit = turnpike::fit_envelope(series, T);
  CHECK(fit.nu_hat == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(fit.c_hat == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(fit.rms_log_error <= 1e-7);
  CHECK(fit.window_lo == doctest::Approx(0.05 * T));
  CHECK(fit.window_hi == doctest::Approx(0.95 * T));
  CHECK(fit.samples_used >= 1700);

  turnpike::RiccatiSolution sol;
  sol.nu = 1.0;
  CHECK(turnpike::compare_rate(fit, sol) == doctest::Approx(0.1).epsilon(1e-5));
}

TEST_CASE("decay: noisy data stays below the inflated envelope") {
  const double T = 20.0;
  auto series = synthetic_series(1.5, 0.7, T, 1500);
  std::mt19937_64 rng(321321u);
  std::uniform_real_distribution<double> noise(-0.08, 0.08);
  for (int k = 0; k < series.d.size(); ++k) {
    series.d(k) *= std::exp(noise(rng));
  }
  const auto fit = turnpike::fit_envelope(series, T);
  CHECK(fit.nu_hat == doctest::Approx(0.7).epsilon(0.02));
  // The rms of uniform(-a, a) noise is a/sqrt(3), so e^{2 rms} inflation
  // dominates the worst-case factor e^{a}.
  for (int k = 0; k < series.t.size(); ++k) {
    const double t = series.t(k);
    if (t < fit.window_lo || t > fit.window_hi) continue;
    CHECK(series.d(k) <= fit.majorant(t, T) * (1.0 + 1e-9));
  }
}

TEST_CASE("decay: too few usable samples") {
  turnpike::DeviationSeries s;
  s.t = Vector::LinSpaced(6, 0.0, 10.0);
  s.d = Vector::Constant(6, 0.5);
  CHECK_THROWS_AS(turnpike::fit_envelope(s, 10.0), turnpike::DegenerateData);

  // Plenty of samples, but all at roundoff level.
  turnpike::DeviationSeries z;
  z.t = Vector::LinSpaced(101, 0.0, 10.0);
  z.d = Vector::Constant(101, 1e-15);
  CHECK_THROWS_AS(turnpike::fit_envelope(z, 10.0), turnpike::DegenerateData);
}

TEST_CASE("decay: growing data has no decaying envelope") {
  turnpike::DeviationSeries s;
  const double T = 10.0;
  s.t = Vector::LinSpaced(201, 0.0, T);
  s.d = Vector(201);
  for (int k = 0; k <= 200; ++k) s.d(k) = 1.0 + s.t(k) / T;
  CHECK_THROWS_AS(turnpike::fit_envelope(s, T), turnpike::NoDecay);
}

TEST_CASE("decay: deviation series against a steady triple") {
  turnpike::SteadyTriple steady;
  steady.y_s = Vector::Constant(1, 0.5);
  steady.u_s = Vector::Constant(1, 0.25);
  steady.lambda_s = Vector::Constant(1, -0.5);

  turnpike::Trajectory tr;
  tr.grid = Vector::LinSpaced(3, 0.0, 1.0);
  tr.y = Matrix::Constant(3, 1, 0.8);       // |dy| = 0.3
  tr.u = Matrix::Constant(3, 1, 0.65);      // |du| = 0.4
  tr.lambda = Matrix::Constant(3, 1, -0.5);  // |dl| = 0
  const auto s = turnpike::deviation_series(tr, steady);
  REQUIRE(s.t.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(s.d(k) == doctest::Approx(0.7).epsilon(1e-14));
  }

  turnpike::SteadyTriple wrong;
  wrong.y_s = Vector::Zero(2);
  wrong.u_s = Vector::Zero(1);
  wrong.lambda_s = Vector::Zero(2);
  CHECK_THROWS_AS(turnpike::deviation_series(tr, wrong),
                  turnpike::GridMismatch);
}

TEST_CASE("decay: dichotomy-path deviation on the double integrator fits "
          "the spectral rate") {
  const auto prob = turnpike::double_integrator_circle();
  const auto care = turnpike::solve_care(prob.A, prob.B, prob.C, prob.Q);
  const Matrix G = prob.B * prob.Q.inverse() * prob.B.transpose();
  const auto lyap = turnpike::solve_lyapunov(care.A_cl, G);

  const double T = 20.0;
  const auto tr = turnpike::solve_horizon_dichotomy(prob, T, 2000);
  const auto tp = turnpike::solve_periodic(prob, care, lyap, 100);
  const auto series = turnpike::deviation_series(tr, tp);
  const auto fit = turnpike::fit_envelope(series, T);

  const double nu_ref = std::sqrt(3.0) / 2.0;
  CHECK(turnpike::compare_rate(fit, care) <= 0.10);
  CHECK(fit.nu_hat == doctest::Approx(nu_ref).epsilon(0.10));

  // Mid-horizon closeness and the majorant property away from the ends.
  for (int k = 0; k < series.t.size(); ++k) {
    const double t = series.t(k);
    if (std::abs(t - T / 2) <= 0.5) CHECK(series.d(k) <= 5e-3);
    if (t >= 1.0 && t <= 19.0) {
      CHECK(series.d(k) <= fit.majorant(t, T) + 1e-12);
    }
  }
}

TEST_CASE("decay: fitted rate is stable under horizon doubling") {
  const auto prob = turnpike::double_integrator_circle();
  const auto care = turnpike::solve_care(prob.A, prob.B, prob.C, prob.Q);
  const Matrix G = prob.B * prob.Q.inverse() * prob.B.transpose();
  const auto lyap = turnpike::solve_lyapunov(care.A_cl, G);
  const auto tp = turnpike::solve_periodic(prob, care, lyap, 100);

  const auto fit_at = [&](double T, int N) {
    const auto tr = turnpike::solve_horizon_dichotomy(prob, T, N);
    return turnpike::fit_envelope(turnpike::deviation_series(tr, tp), T);
  };
  const auto f1 = fit_at(20.0, 2000);
  const auto f2 = fit_at(40.0, 4000);
  CHECK(std::abs(f1.nu_hat - f2.nu_hat) / f2.nu_hat <= 0.05);
}

TEST_CASE("decay: fit csv layout") {
  turnpike::FitRow row;
  row.problem = "di";
  row.T = 20.0;
  row.c_hat = 2.0;
  row.nu_hat = 0.9;
  row.nu_spectral = 0.5;
  row.rel_err = 0.25;
  row.rms_log_error = 0.0;
  std::ostringstream out;
  turnpike::write_fit_csv(out, {row});
  CHECK(out.str() ==
        "problem,T,c_hat,nu_hat,nu_spectral,rel_err,rms_log_error\n"
        "di,20,2,0.9,0.5,0.25,0\n");

  turnpike::DecayFit fit;
  fit.c_hat = 2.0;
  fit.nu_hat = 0.9;
  turnpike::RiccatiSolution sol;
  sol.nu = 0.5;
  const auto made = turnpike::make_fit_row("di", 20.0, fit, sol);
  CHECK(made.rel_err == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(made.nu_spectral == 0.5);
}
