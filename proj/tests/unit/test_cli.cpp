#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "runner.hpp"
#include "turnpike/errors.hpp"
#include "turnpike/model_zoo.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& stem)
      : path(fs::temp_directory_path() / stem) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

int line_count(const fs::path& p) {
  std::ifstream in(p);
  int count = 0;
  std::string line;
  while (std::getline(in, line)) ++count;
  return count;
}

turnpike_cli::RunConfig base_config(const std::string& command,
                                    const std::string& out) {
  turnpike_cli::RunConfig cfg;
  cfg.command = command;
  cfg.name = "double-integrator";
  cfg.out = out;
  return cfg;
}

}  // namespace

TEST_CASE("cli: configuration validation") {
  std::ostringstream log;
  TempDir dir("turnpike_cli_validate");

  auto cfg = base_config("horizon", dir.str());
  CHECK_THROWS_AS(turnpike_cli::run(cfg, log), turnpike_cli::ConfigError);

  cfg.T = 10.0;
  cfg.N = 8;  // grids below 16 steps are rejected
  CHECK_THROWS_AS(turnpike_cli::run(cfg, log), turnpike_cli::ConfigError);

  cfg.N = 100;
  cfg.T = -1.0;
  CHECK_THROWS_AS(turnpike_cli::run(cfg, log), turnpike_cli::ConfigError);

  auto both = base_config("care", dir.str());
  both.problem_file = "somewhere.json";
  CHECK_THROWS_AS(turnpike_cli::run(both, log), turnpike_cli::ConfigError);

  turnpike_cli::RunConfig neither;
  neither.command = "care";
  neither.out = dir.str();
  CHECK_THROWS_AS(turnpike_cli::run(neither, log), turnpike_cli::ConfigError);

  auto unknown = base_config("frobnicate", dir.str());
  CHECK_THROWS_AS(turnpike_cli::run(unknown, log), turnpike_cli::ConfigError);

  // The canonical circle target is not constant, so the steady command
  // cannot apply.
  auto stat = base_config("static", dir.str());
  CHECK_THROWS_AS(turnpike_cli::run(stat, log), turnpike_cli::ConfigError);

  auto sweep = base_config("sweep", dir.str());
  sweep.T_list = {};
  CHECK_THROWS_AS(turnpike_cli::run(sweep, log), turnpike_cli::ConfigError);
}

TEST_CASE("cli: solver failures surface as typed errors") {
  std::ostringstream log;
  TempDir dir("turnpike_cli_solver_error");

  // Unstable, uncontrollable scalar problem.
  turnpike::LqProblem bad;
  bad.label = "unstabilizable";
  bad.A = turnpike::Matrix::Constant(1, 1, 1.0);
  bad.B = turnpike::Matrix::Zero(1, 1);
  bad.C = turnpike::Matrix::Identity(1, 1);
  bad.Q = turnpike::Matrix::Identity(1, 1);
  bad.Pi = 1.0;
  bad.y0 = turnpike::Vector::Zero(1);
  bad.y_d = turnpike::SignalSpec::make_constant(turnpike::Vector::Ones(1));
  bad.u_d = turnpike::SignalSpec::make_constant(turnpike::Vector::Zero(1));
  const fs::path file = dir.path / "bad.json";
  turnpike::save_problem(file.string(), bad);

  turnpike_cli::RunConfig cfg;
  cfg.command = "care";
  cfg.problem_file = file.string();
  cfg.out = (dir.path / "out").string();
  CHECK_THROWS_AS(turnpike_cli::run(cfg, log), turnpike::NotStabilizable);
}

TEST_CASE("cli: care command writes the closed-loop data") {
  std::ostringstream log;
  TempDir dir("turnpike_cli_care");
  auto cfg = base_config("care", dir.str());
  turnpike_cli::run(cfg, log);

  const fs::path file = dir.path / "care.json";
  REQUIRE(fs::exists(file));
  const auto j = nlohmann::json::parse(slurp(file));
  REQUIRE(j.at("n").get<int>() == 2);
  const auto P = j.at("P").get<std::vector<double>>();
  REQUIRE(P.size() == 4);
  const double s3 = std::sqrt(3.0);
  CHECK(std::abs(P[0] - s3) <= 1e-8);
  CHECK(std::abs(P[1] - 1.0) <= 1e-8);
  CHECK(std::abs(P[2] - 1.0) <= 1e-8);
  CHECK(std::abs(P[3] - s3) <= 1e-8);
  CHECK(std::abs(j.at("nu").get<double>() - s3 / 2.0) <= 1e-10);
  CHECK(log.str().find("nu") != std::string::npos);
}

TEST_CASE("cli: static command on constant targets") {
  std::ostringstream log;
  TempDir dir("turnpike_cli_static");
  turnpike::LqProblem p = turnpike::zoo_problem("double-integrator");
  turnpike::Vector yc(2);
  yc << 1.0, 0.0;
  p.y_d = turnpike::SignalSpec::make_constant(yc);
  p.u_d = turnpike::SignalSpec::make_constant(turnpike::Vector::Zero(1));
  const fs::path file = dir.path / "steady.json";
  turnpike::save_problem(file.string(), p);

  turnpike_cli::RunConfig cfg;
  cfg.command = "static";
  cfg.problem_file = file.string();
  cfg.out = (dir.path / "out").string();
  turnpike_cli::run(cfg, log);
  const auto j =
      nlohmann::json::parse(slurp(dir.path / "out" / "static.json"));
  const auto ys = j.at("y_s").get<std::vector<double>>();
  CHECK(std::abs(ys[0] - 1.0) <= 1e-12);
  CHECK(std::abs(ys[1]) <= 1e-12);
}

TEST_CASE("cli: periodic command defaults its grid audibly") {
  std::ostringstream log;
  TempDir dir("turnpike_cli_periodic");
  auto cfg = base_config("periodic", dir.str());
  turnpike_cli::run(cfg, log);
  CHECK(log.str().find("default N = 200") != std::string::npos);

  const fs::path file = dir.path / "turnpike.csv";
  REQUIRE(fs::exists(file));
  CHECK(first_line(file) ==
        "t,y_pi_1,y_pi_2,lambda_pi_1,lambda_pi_2,u_pi_1");
  CHECK(line_count(file) == 202);  // header + 201 samples
}

TEST_CASE("cli: horizon command writes both paths") {
  std::ostringstream log;
  TempDir dir("turnpike_cli_horizon");
  auto cfg = base_config("horizon", dir.str());
  cfg.T = 10.0;
  cfg.N = 500;
  turnpike_cli::run(cfg, log);
  const fs::path a = dir.path / "trajectory.csv";
  const fs::path b = dir.path / "trajectory_direct.csv";
  REQUIRE(fs::exists(a));
  REQUIRE(fs::exists(b));
  CHECK(first_line(a) == "t,y_1,y_2,lambda_1,lambda_2,u_1");
  CHECK(line_count(a) == 502);
  CHECK(line_count(b) == 502);
}

TEST_CASE("cli: decay command fits the deviation") {
  std::ostringstream log;
  TempDir dir("turnpike_cli_decay");
  auto cfg = base_config("decay", dir.str());
  cfg.T = 20.0;
  cfg.N = 2000;
  turnpike_cli::run(cfg, log);
  REQUIRE(fs::exists(dir.path / "deviation.csv"));
  REQUIRE(fs::exists(dir.path / "fit.csv"));
  CHECK(first_line(dir.path / "fit.csv") ==
        "problem,T,c_hat,nu_hat,nu_spectral,rel_err,rms_log_error");
  CHECK(line_count(dir.path / "fit.csv") == 2);
  CHECK(first_line(dir.path / "deviation.csv") == "t,d");
}

TEST_CASE("cli: sweep command tabulates the boundary ratio") {
  std::ostringstream log;
  TempDir dir("turnpike_cli_sweep");
  auto cfg = base_config("sweep", dir.str());
  cfg.T_list = {5.0, 10.0};
  turnpike_cli::run(cfg, log);
  const fs::path file = dir.path / "sweep.csv";
  REQUIRE(fs::exists(file));
  CHECK(first_line(file) == "T,r");
  CHECK(line_count(file) == 3);
}

TEST_CASE("cli: example command is deterministic") {
  std::ostringstream log_a, log_b;
  TempDir dir_a("turnpike_cli_example_a");
  TempDir dir_b("turnpike_cli_example_b");

  auto cfg = base_config("example", dir_a.str());
  cfg.T = 10.0;
  cfg.N = 1000;
  turnpike_cli::run(cfg, log_a);
  cfg.out = dir_b.str();
  turnpike_cli::run(cfg, log_b);

  for (const char* name : {"fig1.csv", "fit.csv", "summary.txt"}) {
    REQUIRE(fs::exists(dir_a.path / name));
    REQUIRE(fs::exists(dir_b.path / name));
    CHECK(slurp(dir_a.path / name) == slurp(dir_b.path / name));
  }
  const std::string summary = slurp(dir_a.path / "summary.txt");
  CHECK(summary.find("[PASS]") != std::string::npos);
  CHECK(summary.find("[FAIL]") == std::string::npos);
  CHECK(first_line(dir_a.path / "fig1.csv") ==
        "t,y_1,y_2,lambda_1,lambda_2,u_1,"
        "y_pi_1,y_pi_2,lambda_pi_1,lambda_pi_2,u_pi_1");
}

TEST_CASE("cli: environment override for the output directory") {
  std::ostringstream log;
  TempDir dir("turnpike_cli_env");
  const std::string env_out = (dir.path / "env_target").string();
  setenv("TURNPIKE_OUT", env_out.c_str(), 1);
  auto cfg = base_config("care", (dir.path / "ignored").string());
  turnpike_cli::apply_env_override(cfg);
  unsetenv("TURNPIKE_OUT");
  CHECK(cfg.out == env_out);
  turnpike_cli::run(cfg, log);
  CHECK(fs::exists(fs::path(env_out) / "care.json"));
  CHECK(!fs::exists(dir.path / "ignored" / "care.json"));

  // Without the variable the configured directory stands.
  auto cfg2 = base_config("care", (dir.path / "plain").string());
  turnpike_cli::apply_env_override(cfg2);
  CHECK(cfg2.out == (dir.path / "plain").string());
}
