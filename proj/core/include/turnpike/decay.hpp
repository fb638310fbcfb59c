#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "turnpike/horizon.hpp"
#include "turnpike/periodic.hpp"
#include "turnpike/riccati.hpp"
#include "turnpike/static_turnpike.hpp"

namespace turnpike {

// Pointwise turnpike deviation d(t) = ||dy|| + ||du|| + ||dl|| sampled on a
// trajectory grid (sum of Euclidean norms of the three deviations).
struct DeviationSeries {
  Vector t;
  Vector d;
};

// Against the periodic turnpike extended by periodicity.
DeviationSeries deviation_series(const Trajectory& traj,
                                 const PeriodicTurnpike& turnpike);
// Against a steady turnpike (constant targets).
DeviationSeries deviation_series(const Trajectory& traj,
                                 const SteadyTriple& steady);

// Two-sided exponential envelope c * (e^{-nu t} + e^{-nu (T-t)}) fitted to
// log d(t) by golden-section search on nu with the closed-form optimal c.
struct DecayFit {
  double c_hat = 0.0;
  double nu_hat = 0.0;
  double rms_log_error = 0.0;
  double window_lo = 0.0, window_hi = 0.0;  // fit window inside [0, T]
  int samples_used = 0;

  double envelope(double t, double T) const;
  // The documented majorant: envelope inflated by e^{2 rms_log_error}.
  double majorant(double t, double T) const;
};

// Fit window is [0.05 T, 0.95 T]; samples with d <= 100 * machine epsilon
// are discarded. Throws DegenerateData (< 8 usable samples) or NoDecay
// (least squares prefers a nonpositive rate).
DecayFit fit_envelope(const DeviationSeries& series, double T);

// |nu_hat - sol.nu| / sol.nu.
double compare_rate(const DecayFit& fit, const RiccatiSolution& sol);

// CSV row: problem,T,c_hat,nu_hat,nu_spectral,rel_err,rms_log_error.
struct FitRow {
  std::string problem;
  double T = 0.0;
  double c_hat = 0.0;
  double nu_hat = 0.0;
  double nu_spectral = 0.0;
  double rel_err = 0.0;
  double rms_log_error = 0.0;
};

FitRow make_fit_row(const std::string& problem, double T, const DecayFit& fit,
                    const RiccatiSolution& sol);
void write_fit_csv(std::ostream& out, const std::vector<FitRow>& rows);

}  // namespace turnpike
