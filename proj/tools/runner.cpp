#include "runner.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "turnpike/decay.hpp"
#include "turnpike/horizon.hpp"
#include "turnpike/io.hpp"
#include "turnpike/model_zoo.hpp"
#include "turnpike/periodic.hpp"
#include "turnpike/riccati.hpp"
#include "turnpike/static_turnpike.hpp"

namespace fs = std::filesystem;

namespace turnpike_cli {

namespace {

using turnpike::format_double;
using turnpike::Matrix;
using turnpike::Vector;

std::vector<double> flatten_row_major(const Matrix& M) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(M.size()));
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) v.push_back(M(r, c));
  }
  return v;
}

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::ofstream open_output(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + p.string());
  return f;
}

void write_json(const fs::path& p, const nlohmann::json& j) {
  auto f = open_output(p);
  f << j.dump(2) << '\n';
}

void append_labels(std::ostream& out, const std::string& stem,
                   Eigen::Index count) {
  for (Eigen::Index j = 0; j < count; ++j) {
    out << ',' << stem << '_' << (j + 1);
  }
}

void append_row(std::ostream& out, const Eigen::RowVectorXd& row) {
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    out << ',' << format_double(row(j));
  }
}

// Mirrors the sample count the horizon solver uses for its internal orbit,
// so turnpike comparisons land on the same grid whenever T is a whole
// number of periods.
int aligned_orbit_samples(double Pi, double T, int N) {
  const double x = N * Pi / T;
  const double r = std::round(x);
  const double v = (std::abs(x - r) <= 1e-9 * (1.0 + x)) ? r : std::ceil(x);
  return std::max(16, static_cast<int>(v));
}

struct DecoupledData {
  turnpike::RiccatiSolution care;
  turnpike::LyapunovSolution lyap;
};

DecoupledData decouple(const turnpike::LqProblem& prob) {
  DecoupledData d;
  d.care = turnpike::solve_care(prob.A, prob.B, prob.C, prob.Q);
  const Matrix G = prob.B *
                   prob.Q.llt().solve(Matrix(prob.B.transpose()));
  d.lyap = turnpike::solve_lyapunov(d.care.A_cl, turnpike::symmetrize(G));
  return d;
}

// ---- commands --------------------------------------------------------------

void run_care(const turnpike::LqProblem& prob, const fs::path& dir,
              std::ostream& log) {
  const auto sol = turnpike::solve_care(prob.A, prob.B, prob.C, prob.Q);
  nlohmann::json j;
  j["n"] = static_cast<int>(prob.n());
  j["P"] = flatten_row_major(sol.P);
  j["A_cl"] = flatten_row_major(sol.A_cl);
  j["nu"] = sol.nu;
  j["residual"] = sol.residual_norm;
  write_json(dir / "care.json", j);
  log << "care: nu = " << sol.nu << ", residual = " << sol.residual_norm
      << '\n';
}

void run_static(const turnpike::LqProblem& prob, const fs::path& dir,
                std::ostream& log) {
  if (prob.y_d.kind != turnpike::SignalKind::Constant ||
      prob.u_d.kind != turnpike::SignalKind::Constant) {
    throw ConfigError(
        "the static command needs constant targets; use periodic instead");
  }
  const auto s = turnpike::solve_static(prob.A, prob.B, prob.C, prob.Q,
                                        prob.y_d.constant, prob.u_d.constant);
  nlohmann::json j;
  j["y_s"] = to_std(s.y_s);
  j["u_s"] = to_std(s.u_s);
  j["lambda_s"] = to_std(s.lambda_s);
  j["residual"] = s.residual_norm;
  write_json(dir / "static.json", j);
  log << "static: residual = " << s.residual_norm << '\n';
}

void run_periodic(const turnpike::LqProblem& prob, int N, const fs::path& dir,
                  std::ostream& log) {
  const auto dec = decouple(prob);
  const auto tp = turnpike::solve_periodic(prob, dec.care, dec.lyap, N);

  auto f = open_output(dir / "turnpike.csv");
  f << 't';
  append_labels(f, "y_pi", prob.n());
  append_labels(f, "lambda_pi", prob.n());
  append_labels(f, "u_pi", prob.m());
  f << '\n';
  const Vector t = Vector::LinSpaced(N + 1, 0.0, prob.Pi);
  for (int k = 0; k <= N; ++k) {
    f << format_double(t(k));
    append_row(f, tp.y_pi.values.row(k));
    append_row(f, tp.lambda_pi.values.row(k));
    append_row(f, tp.u_pi.values.row(k));
    f << '\n';
  }
  log << "periodic: optimality residual = " << tp.optimality_residual << '\n';
}

void run_horizon(const turnpike::LqProblem& prob, double T, int N,
                 const fs::path& dir, std::ostream& log) {
  const auto a = turnpike::solve_horizon_dichotomy(prob, T, N);
  const auto b = turnpike::solve_horizon_direct(prob, T, N);
  {
    auto f = open_output(dir / "trajectory.csv");
    turnpike::write_trajectory_csv(f, a);
  }
  {
    auto f = open_output(dir / "trajectory_direct.csv");
    turnpike::write_trajectory_csv(f, b);
  }
  log << "horizon: decoupled residual = " << a.bvp_residual
      << ", direct residual = " << b.bvp_residual << '\n';
}

void run_decay(const turnpike::LqProblem& prob, double T, int N,
               const fs::path& dir, std::ostream& log) {
  const auto dec = decouple(prob);
  const auto tr = turnpike::solve_horizon_dichotomy(prob, T, N);
  const int n_orbit = aligned_orbit_samples(prob.Pi, T, N);
  const auto tp = turnpike::solve_periodic(prob, dec.care, dec.lyap, n_orbit);
  const auto series = turnpike::deviation_series(tr, tp);

  {
    auto f = open_output(dir / "deviation.csv");
    f << "t,d\n";
    for (Eigen::Index k = 0; k < series.t.size(); ++k) {
      f << format_double(series.t(k)) << ',' << format_double(series.d(k))
        << '\n';
    }
  }
  const auto fit = turnpike::fit_envelope(series, T);
  {
    auto f = open_output(dir / "fit.csv");
    turnpike::write_fit_csv(f, {turnpike::make_fit_row(prob.label, T, fit,
                                                       dec.care)});
  }
  log << "decay: nu_hat = " << fit.nu_hat << ", nu_spectral = " << dec.care.nu
      << '\n';
}

void run_sweep(const turnpike::LqProblem& prob,
               const std::vector<double>& T_list, unsigned long long seed,
               const fs::path& dir, std::ostream& log) {
  const auto rows =
      turnpike::check_stability_estimate(prob, T_list, 200, seed);
  auto f = open_output(dir / "sweep.csv");
  f << "T,r\n";
  for (const auto& [T, r] : rows) {
    f << format_double(T) << ',' << format_double(r) << '\n';
  }
  log << "sweep: " << rows.size() << " horizons\n";
}

void run_example(const turnpike::LqProblem& prob, double T, int N,
                 const fs::path& dir, std::ostream& log) {
  const auto dec = decouple(prob);
  const auto tr = turnpike::solve_horizon_dichotomy(prob, T, N);
  const int n_orbit = aligned_orbit_samples(prob.Pi, T, N);
  const auto tp = turnpike::solve_periodic(prob, dec.care, dec.lyap, n_orbit);
  const auto series = turnpike::deviation_series(tr, tp);
  const auto fit = turnpike::fit_envelope(series, T);

  {
    auto f = open_output(dir / "fig1.csv");
    f << 't';
    append_labels(f, "y", prob.n());
    append_labels(f, "lambda", prob.n());
    append_labels(f, "u", prob.m());
    append_labels(f, "y_pi", prob.n());
    append_labels(f, "lambda_pi", prob.n());
    append_labels(f, "u_pi", prob.m());
    f << '\n';
    for (Eigen::Index k = 0; k < tr.grid.size(); ++k) {
      const double t = tr.grid(k);
      f << format_double(t);
      append_row(f, tr.y.row(k));
      append_row(f, tr.lambda.row(k));
      append_row(f, tr.u.row(k));
      append_row(f, tp.y_pi.eval(t).transpose());
      append_row(f, tp.lambda_pi.eval(t).transpose());
      append_row(f, tp.u_pi.eval(t).transpose());
      f << '\n';
    }
  }
  {
    auto f = open_output(dir / "fit.csv");
    turnpike::write_fit_csv(f, {turnpike::make_fit_row(prob.label, T, fit,
                                                       dec.care)});
  }

  auto f = open_output(dir / "summary.txt");
  f << "example: " << prob.label << ", T = " << format_double(T)
    << ", N = " << N << '\n';
  const auto report = [&f](bool ok, const std::string& line) {
    f << (ok ? "[PASS] " : "[FAIL] ") << line << '\n';
  };

  const double care_tol =
      1e-9 * (1.0 + dec.care.P.norm() * dec.care.P.norm());
  report(dec.care.residual_norm <= care_tol,
         "algebraic Riccati residual " + format_double(dec.care.residual_norm)
             + " within " + format_double(care_tol));

  const double gap0 = (tr.y.row(0).transpose() - prob.y0).norm();
  report(gap0 == 0.0, "initial state reproduced exactly (gap "
                          + format_double(gap0) + ")");

  const double lT = tr.lambda.row(tr.lambda.rows() - 1).norm();
  report(lT <= 1e-8, "terminal costate norm " + format_double(lT)
                         + " within 1e-08");

  const double rate_err = turnpike::compare_rate(fit, dec.care);
  report(rate_err <= 0.15,
         "fitted decay rate " + format_double(fit.nu_hat) + " within 15% of "
             + format_double(dec.care.nu));

  bool majorized = true;
  double min_slack = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < series.t.size(); ++k) {
    const double t = series.t(k);
    if (t < 1.0 || t > T - 1.0) continue;
    min_slack = std::min(min_slack, fit.majorant(t, T) - series.d(k));
    if (series.d(k) > fit.majorant(t, T) + 1e-12) majorized = false;
  }
  report(majorized, "inflated envelope majorizes the deviation on [1, T-1] "
                        "(slack " + format_double(min_slack) + ")");
  log << "example: wrote fig1.csv, fit.csv, summary.txt\n";
}

}  // namespace

void apply_env_override(RunConfig& cfg) {
  const char* env = std::getenv("TURNPIKE_OUT");
  if (env != nullptr && env[0] != '\0') cfg.out = env;
}

void run(const RunConfig& cfg, std::ostream& log) {
  static const std::set<std::string> commands = {
      "care", "static", "periodic", "horizon", "decay", "sweep", "example"};
  if (commands.count(cfg.command) == 0) {
    throw ConfigError("unknown command: " + cfg.command);
  }
  if (cfg.problem_file.empty() == cfg.name.empty()) {
    throw ConfigError("give exactly one of --problem and --name");
  }
  if (cfg.T && !(*cfg.T > 0.0 && std::isfinite(*cfg.T))) {
    throw ConfigError("T must be positive and finite");
  }
  if (cfg.N && *cfg.N < 16) {
    throw ConfigError("N must be at least 16");
  }
  const bool needs_grid = cfg.command == "horizon" || cfg.command == "decay" ||
                          cfg.command == "example";
  if (needs_grid && (!cfg.T || !cfg.N)) {
    throw ConfigError(cfg.command + " needs both --T and --N");
  }
  if (cfg.command == "sweep") {
    if (cfg.T_list.empty()) {
      throw ConfigError("sweep needs a nonempty list of horizons in --T");
    }
    for (double T : cfg.T_list) {
      if (!(T > 0.0 && std::isfinite(T))) {
        throw ConfigError("sweep horizons must be positive and finite");
      }
    }
  }

  turnpike::LqProblem prob;
  if (!cfg.name.empty()) {
    try {
      prob = turnpike::zoo_problem(cfg.name);
    } catch (const turnpike::InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  } else {
    prob = turnpike::load_problem(cfg.problem_file);
  }

  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  log << cfg.command << " on " << prob.label << " -> " << dir.string()
      << '\n';

  if (cfg.command == "care") {
    run_care(prob, dir, log);
  } else if (cfg.command == "static") {
    run_static(prob, dir, log);
  } else if (cfg.command == "periodic") {
    int N = 200;
    if (cfg.N) {
      N = *cfg.N;
    } else {
      log << "default N = 200\n";
    }
    run_periodic(prob, N, dir, log);
  } else if (cfg.command == "horizon") {
    run_horizon(prob, *cfg.T, *cfg.N, dir, log);
  } else if (cfg.command == "decay") {
    run_decay(prob, *cfg.T, *cfg.N, dir, log);
  } else if (cfg.command == "sweep") {
    run_sweep(prob, cfg.T_list, cfg.seed, dir, log);
  } else {
    run_example(prob, *cfg.T, *cfg.N, dir, log);
  }
}

}  // namespace turnpike_cli
