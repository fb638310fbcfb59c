#include "turnpike/model_zoo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "turnpike/errors.hpp"

namespace turnpike {
namespace {

using nlohmann::json;

constexpr double kTwoPi = 6.283185307179586476925286766559;

void require_subdomain(const std::vector<int>& omega, int n,
                       const char* which) {
  if (omega.empty()) {
    throw BadSubdomain(std::string(which) + " must name at least one node");
  }
  for (int node : omega) {
    if (node < 1 || node > n) {
      throw BadSubdomain(std::string(which) + " node " +
                         std::to_string(node) + " is outside 1.." +
                         std::to_string(n));
    }
  }
}

// sqrt(h)-scaled node selection: columns are scaled unit vectors, so the
// discrete quadratic form approximates the L2 mass on the subdomain.
Matrix selection_columns(int n, const std::vector<int>& omega, double h) {
  Matrix S = Matrix::Zero(n, static_cast<Eigen::Index>(omega.size()));
  for (std::size_t j = 0; j < omega.size(); ++j) {
    S(omega[j] - 1, static_cast<Eigen::Index>(j)) = std::sqrt(h);
  }
  return S;
}

Matrix dirichlet_laplacian(int n, double h) {
  Matrix L = Matrix::Zero(n, n);
  const double off = 1.0 / (h * h);
  for (int i = 0; i < n; ++i) {
    L(i, i) = -2.0 / (h * h);
    if (i > 0) L(i, i - 1) = off;
    if (i + 1 < n) L(i, i + 1) = off;
  }
  return L;
}

void validate_table(const SignalSpec& s, double Pi, const std::string& field) {
  const Eigen::Index rows = s.table_times.size();
  if (rows < 2 || s.table_values.rows() != rows) {
    throw ValidationError(field + " table needs matching times and values "
                          "with at least two samples");
  }
  for (Eigen::Index i = 1; i < rows; ++i) {
    if (!(s.table_times(i) > s.table_times(i - 1))) {
      throw ValidationError(field + " table times must be strictly "
                            "increasing");
    }
  }
  if (std::abs(s.table_times(0)) > 1e-12 * Pi) {
    throw ValidationError(field + " table must start at time 0");
  }
  if (std::abs(s.table_times(rows - 1) - Pi) > 1e-12 * Pi) {
    throw ValidationError(field + " table must end at the period");
  }
  const double scale = 1.0 + s.table_values.cwiseAbs().maxCoeff();
  if ((s.table_values.row(0) - s.table_values.row(rows - 1)).norm() >
      1e-8 * scale) {
    throw ValidationError(field + " table signal is not periodic: endpoint "
                          "rows differ");
  }
}

void validate_signal(const SignalSpec& s, Eigen::Index expected_dim,
                     double Pi, const std::string& field) {
  if (s.dim() != expected_dim) {
    throw ValidationError(field + " has dimension " +
                          std::to_string(s.dim()) + ", expected " +
                          std::to_string(expected_dim));
  }
  if (s.kind == SignalKind::Table) validate_table(s, Pi, field);
}

// --- JSON helpers -----------------------------------------------------------

Matrix matrix_from_flat(const std::vector<double>& flat, Eigen::Index rows,
                        Eigen::Index cols, const std::string& field) {
  if (static_cast<Eigen::Index>(flat.size()) != rows * cols) {
    throw ValidationError(field + " has " + std::to_string(flat.size()) +
                          " entries, expected " + std::to_string(rows * cols));
  }
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      M(i, j) = flat[static_cast<std::size_t>(i * cols + j)];
    }
  }
  return M;
}

std::vector<double> matrix_to_flat(const Matrix& M) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(M.size()));
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) flat.push_back(M(i, j));
  }
  return flat;
}

json signal_to_json(const SignalSpec& s) {
  json j;
  switch (s.kind) {
    case SignalKind::Constant: {
      j["kind"] = "constant";
      j["data"]["value"] = std::vector<double>(
          s.constant.data(), s.constant.data() + s.constant.size());
      break;
    }
    case SignalKind::Sinusoid: {
      j["kind"] = "sinusoid";
      json comps = json::array();
      for (const auto& c : s.components) {
        comps.push_back({{"offset", c.offset},
                         {"amplitude", c.amplitude},
                         {"harmonic", c.harmonic},
                         {"phase", c.phase}});
      }
      j["data"]["components"] = comps;
      break;
    }
    case SignalKind::Table: {
      j["kind"] = "table";
      j["data"]["times"] = std::vector<double>(
          s.table_times.data(), s.table_times.data() + s.table_times.size());
      json rows = json::array();
      for (Eigen::Index i = 0; i < s.table_values.rows(); ++i) {
        rows.push_back(std::vector<double>(
            s.table_values.row(i).begin(), s.table_values.row(i).end()));
      }
      j["data"]["values"] = rows;
      break;
    }
  }
  return j;
}

SignalSpec signal_from_json(const json& j, const std::string& field) {
  const std::string kind = j.at("kind").get<std::string>();
  const json& data = j.at("data");
  if (kind == "constant") {
    const auto value = data.at("value").get<std::vector<double>>();
    return SignalSpec::make_constant(
        Eigen::Map<const Vector>(value.data(),
                                 static_cast<Eigen::Index>(value.size())));
  }
  if (kind == "sinusoid") {
    std::vector<SinusoidComponent> comps;
    for (const auto& c : data.at("components")) {
      SinusoidComponent comp;
      comp.offset = c.at("offset").get<double>();
      comp.amplitude = c.at("amplitude").get<double>();
      comp.harmonic = c.at("harmonic").get<int>();
      comp.phase = c.at("phase").get<double>();
      comps.push_back(comp);
    }
    return SignalSpec::make_sinusoid(std::move(comps));
  }
  if (kind == "table") {
    const auto times = data.at("times").get<std::vector<double>>();
    const auto rows = data.at("values").get<std::vector<std::vector<double>>>();
    if (rows.empty()) {
      throw ValidationError(field + " table has no value rows");
    }
    Matrix values(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.front().size()) {
        throw ValidationError(field + " table rows have inconsistent widths");
      }
      for (std::size_t k = 0; k < rows[i].size(); ++k) {
        values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
            rows[i][k];
      }
    }
    return SignalSpec::make_table(
        Eigen::Map<const Vector>(times.data(),
                                 static_cast<Eigen::Index>(times.size())),
        values);
  }
  throw ParseError(field + " has unknown signal kind \"" + kind + "\"");
}

}  // namespace

// --- SignalSpec -------------------------------------------------------------

Eigen::Index SignalSpec::dim() const {
  switch (kind) {
    case SignalKind::Constant:
      return constant.size();
    case SignalKind::Sinusoid:
      return static_cast<Eigen::Index>(components.size());
    case SignalKind::Table:
      return table_values.cols();
  }
  return 0;
}

Vector SignalSpec::eval(double t, double Pi) const {
  switch (kind) {
    case SignalKind::Constant:
      return constant;
    case SignalKind::Sinusoid: {
      Vector v(dim());
      for (std::size_t i = 0; i < components.size(); ++i) {
        const auto& c = components[i];
        v(static_cast<Eigen::Index>(i)) =
            c.offset +
            c.amplitude * std::cos(kTwoPi * c.harmonic * t / Pi + c.phase);
      }
      return v;
    }
    case SignalKind::Table: {
      double s = t - std::floor(t / Pi) * Pi;
      const Eigen::Index rows = table_times.size();
      if (s <= table_times(0)) return table_values.row(0).transpose();
      if (s >= table_times(rows - 1)) {
        return table_values.row(rows - 1).transpose();
      }
      Eigen::Index hi = 1;
      while (hi < rows - 1 && table_times(hi) < s) ++hi;
      const double t0 = table_times(hi - 1);
      const double t1 = table_times(hi);
      const double theta = (s - t0) / (t1 - t0);
      return ((1.0 - theta) * table_values.row(hi - 1) +
              theta * table_values.row(hi))
          .transpose();
    }
  }
  return Vector();
}

SignalSpec SignalSpec::make_constant(const Vector& v) {
  SignalSpec s;
  s.kind = SignalKind::Constant;
  s.constant = v;
  return s;
}

SignalSpec SignalSpec::make_sinusoid(std::vector<SinusoidComponent> comps) {
  SignalSpec s;
  s.kind = SignalKind::Sinusoid;
  s.components = std::move(comps);
  return s;
}

SignalSpec SignalSpec::make_table(const Vector& times, const Matrix& values) {
  SignalSpec s;
  s.kind = SignalKind::Table;
  s.table_times = times;
  s.table_values = values;
  return s;
}

// --- validation --------------------------------------------------------------

void validate_problem(const LqProblem& p) {
  const Eigen::Index n = p.A.rows();
  if (p.A.cols() != n) throw ValidationError("A must be square");
  if (p.B.rows() != n) {
    throw ValidationError("B must have one row per state");
  }
  if (p.C.cols() != n) {
    throw ValidationError("C must have one column per state");
  }
  const Eigen::Index m = p.B.cols();
  if (p.Q.rows() != m || p.Q.cols() != m) {
    throw ValidationError("Q must be square with one row per control");
  }
  if ((p.Q - p.Q.transpose()).norm() > 1e-10 * (1.0 + p.Q.norm())) {
    throw ValidationError("Q must be symmetric");
  }
  Eigen::LLT<Matrix> llt(p.Q);
  if (llt.info() != Eigen::Success) {
    throw ValidationError("Q must be positive definite");
  }
  if (!(p.Pi > 0.0)) throw ValidationError("Pi must be positive");
  if (p.y0.size() != n) {
    throw ValidationError("y0 has " + std::to_string(p.y0.size()) +
                          " entries, expected " + std::to_string(n));
  }
  validate_signal(p.y_d, n, p.Pi, "y_d");
  validate_signal(p.u_d, m, p.Pi, "u_d");
}

// --- zoo constructors ---------------------------------------------------------

LqProblem double_integrator_circle() {
  LqProblem p;
  p.label = "double-integrator";
  p.A = Matrix::Zero(2, 2);
  p.A(0, 1) = 1.0;
  p.B = Matrix::Zero(2, 1);
  p.B(1, 0) = 1.0;
  p.C = Matrix::Identity(2, 2);
  p.Q = Matrix::Identity(1, 1);
  p.Pi = 1.0;
  p.y0 = Vector::Zero(2);
  p.y0(0) = 0.1;
  // Unit circle once per period: (cos 2 pi t, sin 2 pi t).
  SinusoidComponent cx{0.0, 1.0, 1, 0.0};
  SinusoidComponent cy{0.0, 1.0, 1, -1.5707963267948966};
  p.y_d = SignalSpec::make_sinusoid({cx, cy});
  p.u_d = SignalSpec::make_constant(Vector::Zero(1));
  return p;
}

LqProblem heat_1d(int n, const Vector& a, const std::vector<int>& omega1,
                  const std::vector<int>& omega2,
                  std::optional<SignalSpec> y_d,
                  std::optional<SignalSpec> u_d) {
  if (n < 1) throw InvalidArgument("heat model needs at least one node");
  if (a.size() != n) {
    throw DimensionMismatch("potential must have one entry per node");
  }
  require_subdomain(omega1, n, "observation subdomain");
  require_subdomain(omega2, n, "control subdomain");

  const double h = 1.0 / (n + 1);
  LqProblem p;
  p.label = "heat";
  p.A = dirichlet_laplacian(n, h);
  p.A.diagonal() -= a;
  p.B = selection_columns(n, omega2, h);
  p.C = selection_columns(n, omega1, h).transpose();
  p.Q = Matrix::Identity(static_cast<Eigen::Index>(omega2.size()),
                         static_cast<Eigen::Index>(omega2.size()));
  p.Pi = 1.0;
  p.y0 = Vector::Zero(n);
  if (y_d.has_value()) {
    p.y_d = std::move(*y_d);
  } else {
    // Slowest Dirichlet mode sin(pi j h) modulated by sin(2 pi t / Pi).
    std::vector<SinusoidComponent> comps(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) {
      comps[static_cast<std::size_t>(j - 1)] = SinusoidComponent{
          0.0, std::sin(M_PI * j * h), 1, -1.5707963267948966};
    }
    p.y_d = SignalSpec::make_sinusoid(std::move(comps));
  }
  if (u_d.has_value()) {
    p.u_d = std::move(*u_d);
  } else {
    p.u_d = SignalSpec::make_constant(
        Vector::Zero(static_cast<Eigen::Index>(omega2.size())));
  }
  return p;
}

LqProblem wave_1d(int n, const std::vector<int>& omega1,
                  const std::vector<int>& omega2) {
  if (n < 3) throw InvalidArgument("wave model needs at least three nodes");
  require_subdomain(omega1, n, "observation subdomain");
  require_subdomain(omega2, n, "control subdomain");

  const double h = 1.0 / (n + 1);
  LqProblem p;
  p.label = "wave";
  p.A = Matrix::Zero(2 * n, 2 * n);
  p.A.topRightCorner(n, n) = Matrix::Identity(n, n);
  p.A.bottomLeftCorner(n, n) = dirichlet_laplacian(n, h);
  const Matrix S2 = selection_columns(n, omega2, h);
  p.B = Matrix::Zero(2 * n, S2.cols());
  p.B.bottomRows(n) = S2;
  const Matrix S1 = selection_columns(n, omega1, h);
  p.C = Matrix::Zero(S1.cols(), 2 * n);
  p.C.rightCols(n) = S1.transpose();
  p.Q = Matrix::Identity(S2.cols(), S2.cols());
  p.Pi = 1.0;
  p.y0 = Vector::Zero(2 * n);
  p.y_d = SignalSpec::make_constant(Vector::Zero(2 * n));
  p.u_d = SignalSpec::make_constant(Vector::Zero(S2.cols()));
  p.metadata["energy_mass_weight"] = {h};
  return p;
}

// --- JSON I/O -----------------------------------------------------------------

LqProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open problem file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("problem file " + path + " is not valid JSON: " +
                     e.what());
  }

  LqProblem p;
  try {
    p.label = j.at("label").get<std::string>();
    const auto n = j.at("n").get<Eigen::Index>();
    const auto m = j.at("m").get<Eigen::Index>();
    const auto rows_c = j.at("p").get<Eigen::Index>();
    p.Pi = j.at("Pi").get<double>();
    p.A = matrix_from_flat(j.at("A").get<std::vector<double>>(), n, n, "A");
    p.B = matrix_from_flat(j.at("B").get<std::vector<double>>(), n, m, "B");
    p.C = matrix_from_flat(j.at("C").get<std::vector<double>>(), rows_c, n,
                           "C");
    p.Q = matrix_from_flat(j.at("Q").get<std::vector<double>>(), m, m, "Q");
    const auto y0 = j.at("y0").get<std::vector<double>>();
    p.y0 = Eigen::Map<const Vector>(y0.data(),
                                    static_cast<Eigen::Index>(y0.size()));
    p.y_d = signal_from_json(j.at("y_d"), "y_d");
    p.u_d = signal_from_json(j.at("u_d"), "u_d");
    if (j.contains("metadata")) {
      p.metadata = j.at("metadata")
                       .get<std::map<std::string, std::vector<double>>>();
    }
  } catch (const json::exception& e) {
    throw ParseError("problem file " + path +
                     " is missing or mistypes a field: " + e.what());
  }
  validate_problem(p);
  return p;
}

void save_problem(const std::string& path, const LqProblem& p) {
  json j;
  j["label"] = p.label;
  j["n"] = p.n();
  j["m"] = p.m();
  j["p"] = p.p();
  j["Pi"] = p.Pi;
  j["A"] = matrix_to_flat(p.A);
  j["B"] = matrix_to_flat(p.B);
  j["C"] = matrix_to_flat(p.C);
  j["Q"] = matrix_to_flat(p.Q);
  j["y0"] = std::vector<double>(p.y0.data(), p.y0.data() + p.y0.size());
  j["y_d"] = signal_to_json(p.y_d);
  j["u_d"] = signal_to_json(p.u_d);
  if (!p.metadata.empty()) j["metadata"] = p.metadata;

  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

LqProblem zoo_problem(const std::string& name) {
  if (name == "double-integrator") return double_integrator_circle();
  if (name == "heat") {
    std::vector<int> all(50);
    for (int i = 0; i < 50; ++i) all[static_cast<std::size_t>(i)] = i + 1;
    return heat_1d(50, Vector::Zero(50), all, all);
  }
  if (name == "wave") {
    std::vector<int> all(16);
    for (int i = 0; i < 16; ++i) all[static_cast<std::size_t>(i)] = i + 1;
    return wave_1d(16, all, all);
  }
  throw InvalidArgument("unknown model name \"" + name +
                        "\" (try double-integrator, heat, or wave)");
}

}  // namespace turnpike
