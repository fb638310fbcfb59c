#include "turnpike/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "turnpike/errors.hpp"
#include "turnpike/io.hpp"

namespace turnpike {

namespace {

void require_series_shapes(const Trajectory& traj, Eigen::Index n,
                           Eigen::Index m) {
  if (traj.y.cols() != n || traj.lambda.cols() != n || traj.u.cols() != m) {
    throw GridMismatch("trajectory and turnpike dimensions differ");
  }
  if (traj.grid.size() != traj.y.rows() ||
      traj.y.rows() != traj.lambda.rows() || traj.y.rows() != traj.u.rows()) {
    throw GridMismatch("trajectory rows do not match its grid");
  }
}

}  // namespace

DeviationSeries deviation_series(const Trajectory& traj,
                                 const PeriodicTurnpike& turnpike) {
  require_series_shapes(traj, turnpike.y_pi.dim(), turnpike.u_pi.dim());
  DeviationSeries s;
  s.t = traj.grid;
  s.d.resize(traj.grid.size());
  for (Eigen::Index k = 0; k < traj.grid.size(); ++k) {
    const double t = traj.grid(k);
    s.d(k) = (traj.y.row(k).transpose() - turnpike.y_pi.eval(t)).norm() +
             (traj.u.row(k).transpose() - turnpike.u_pi.eval(t)).norm() +
             (traj.lambda.row(k).transpose() - turnpike.lambda_pi.eval(t))
                 .norm();
  }
  return s;
}

DeviationSeries deviation_series(const Trajectory& traj,
                                 const SteadyTriple& steady) {
  require_series_shapes(traj, steady.y_s.size(), steady.u_s.size());
  if (steady.lambda_s.size() != steady.y_s.size()) {
    throw GridMismatch("steady triple dimensions are inconsistent");
  }
  DeviationSeries s;
  s.t = traj.grid;
  s.d.resize(traj.grid.size());
  for (Eigen::Index k = 0; k < traj.grid.size(); ++k) {
    s.d(k) = (traj.y.row(k).transpose() - steady.y_s).norm() +
             (traj.u.row(k).transpose() - steady.u_s).norm() +
             (traj.lambda.row(k).transpose() - steady.lambda_s).norm();
  }
  return s;
}

double DecayFit::envelope(double t, double T) const {
  return c_hat * (std::exp(-nu_hat * t) + std::exp(-nu_hat * (T - t)));
}

double DecayFit::majorant(double t, double T) const {
  return envelope(t, T) * std::exp(2.0 * rms_log_error);
}

namespace {

// log(e^{-nu t} + e^{-nu (T-t)}) without underflow in either exponential.
double log_two_sided(double nu, double t, double T) {
  const double a = -nu * t;
  const double b = -nu * (T - t);
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

struct EnvelopeObjective {
  const std::vector<double>& ts;
  const std::vector<double>& logs;
  double T;

  // For fixed nu the optimal log c is the mean residual; returns the
  // centered sum of squares together with that mean.
  void evaluate(double nu, double& sse, double& log_c) const {
    const auto n = ts.size();
    double mean = 0.0;
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = logs[i] - log_two_sided(nu, ts[i], T);
      mean += r[i];
    }
    mean /= static_cast<double>(n);
    sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = r[i] - mean;
      sse += e * e;
    }
    log_c = mean;
  }

  double sse_at(double nu) const {
    double sse = 0.0, log_c = 0.0;
    evaluate(nu, sse, log_c);
    return sse;
  }
};

}  // namespace

DecayFit fit_envelope(const DeviationSeries& series, double T) {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw InvalidArgument("horizon must be positive and finite");
  }
  if (series.t.size() != series.d.size()) {
    throw GridMismatch("deviation series has mismatched lengths");
  }
  const double lo = 0.05 * T;
  const double hi = 0.95 * T;
  const double floor = 100.0 * std::numeric_limits<double>::epsilon();

  std::vector<double> ts, logs;
  for (Eigen::Index k = 0; k < series.t.size(); ++k) {
    const double t = series.t(k);
    const double d = series.d(k);
    if (t < lo || t > hi || !(d > floor) || !std::isfinite(d)) continue;
    ts.push_back(t);
    logs.push_back(std::log(d));
  }
  if (ts.size() < 8) {
    throw DegenerateData("fit window holds " + std::to_string(ts.size()) +
                         " usable samples, need at least 8");
  }

  const EnvelopeObjective obj{ts, logs, T};

  // The nu -> 0 limit of the envelope is a constant, so its centered sum of
  // squares is the flat-fit baseline. Any genuine decay beats it by orders
  // of magnitude; flat or growing data improves on it only at roundoff
  // level, which must not count as a detected rate.
  double sse_flat = 0.0;
  {
    double mean = 0.0;
    for (const double l : logs) mean += l;
    mean /= static_cast<double>(logs.size());
    for (const double l : logs) sse_flat += (l - mean) * (l - mean);
  }

  // Coarse geometric scan, then golden-section refinement of the bracket
  // around the best grid point.
  const double nu_min = 1e-8;
  const double nu_max = 200.0 / (hi - lo);
  const int scan = 240;
  const double ratio = std::pow(nu_max / nu_min, 1.0 / (scan - 1));
  int best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  double nu = nu_min;
  for (int i = 0; i < scan; ++i, nu *= ratio) {
    const double sse = obj.sse_at(nu);
    if (sse < best_sse) {
      best_sse = sse;
      best = i;
    }
  }
  if (best == 0 || best_sse >= sse_flat * (1.0 - 1e-6)) {
    throw NoDecay("least squares prefers a flat or growing envelope");
  }

  double a = nu_min * std::pow(ratio, best - 1);
  double b = nu_min * std::pow(ratio, std::min(best + 1, scan - 1));
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = obj.sse_at(x1);
  double f2 = obj.sse_at(x2);
  while (b - a > 1e-12 * (1.0 + b)) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = obj.sse_at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = obj.sse_at(x2);
    }
  }
  const double nu_hat = 0.5 * (a + b);

  double sse = 0.0, log_c = 0.0;
  obj.evaluate(nu_hat, sse, log_c);

  DecayFit fit;
  fit.nu_hat = nu_hat;
  fit.c_hat = std::exp(log_c);
  fit.rms_log_error = std::sqrt(sse / static_cast<double>(ts.size()));
  fit.window_lo = lo;
  fit.window_hi = hi;
  fit.samples_used = static_cast<int>(ts.size());
  return fit;
}

double compare_rate(const DecayFit& fit, const RiccatiSolution& sol) {
  return std::abs(fit.nu_hat - sol.nu) / sol.nu;
}

FitRow make_fit_row(const std::string& problem, double T, const DecayFit& fit,
                    const RiccatiSolution& sol) {
  FitRow row;
  row.problem = problem;
  row.T = T;
  row.c_hat = fit.c_hat;
  row.nu_hat = fit.nu_hat;
  row.nu_spectral = sol.nu;
  row.rel_err = compare_rate(fit, sol);
  row.rms_log_error = fit.rms_log_error;
  return row;
}

void write_fit_csv(std::ostream& out, const std::vector<FitRow>& rows) {
  out << "problem,T,c_hat,nu_hat,nu_spectral,rel_err,rms_log_error\n";
  for (const auto& row : rows) {
    out << row.problem << ',' << format_double(row.T) << ','
        << format_double(row.c_hat) << ',' << format_double(row.nu_hat) << ','
        << format_double(row.nu_spectral) << ',' << format_double(row.rel_err)
        << ',' << format_double(row.rms_log_error) << '\n';
  }
}

}  // namespace turnpike
