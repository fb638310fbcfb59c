#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "runner.hpp"
#include "turnpike/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Steady and periodic exponential turnpikes for linear-quadratic "
      "tracking problems"};
  app.require_subcommand(1);

  turnpike_cli::RunConfig cfg;
  double T_value = 0.0;
  int N_value = 0;

  const std::vector<std::pair<std::string, std::string>> subcommands = {
      {"care", "solve the algebraic Riccati equation and report the closed "
               "loop"},
      {"static", "steady turnpike triple for constant targets"},
      {"periodic", "periodic turnpike orbit over one period"},
      {"horizon", "finite-horizon extremal by both solution paths"},
      {"decay", "deviation from the turnpike and fitted decay envelope"},
      {"sweep", "boundary-data amplification ratio across horizons"},
      {"example", "end-to-end demonstration with figure data and a summary"},
  };

  std::map<const CLI::App*, std::pair<CLI::Option*, CLI::Option*>> grid_opts;
  for (const auto& [name, description] : subcommands) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("--problem", cfg.problem_file,
                    "path to a JSON problem instance");
    sub->add_option("--name", cfg.name,
                    "canonical instance: double-integrator, heat, wave");
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--seed", cfg.seed, "seed for randomized boundary data");
    CLI::Option* opt_T = nullptr;
    if (name == "sweep") {
      sub->add_option("--T", cfg.T_list, "comma-separated horizon lengths")
          ->delimiter(',');
    } else {
      opt_T = sub->add_option("--T", T_value, "horizon length");
    }
    CLI::Option* opt_N = sub->add_option("--N", N_value,
                                         "number of grid steps");
    grid_opts[sub] = {opt_T, opt_N};
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  const auto& [opt_T, opt_N] = grid_opts.at(sub);
  if (opt_T != nullptr && opt_T->count() > 0) cfg.T = T_value;
  if (opt_N->count() > 0) cfg.N = N_value;

  turnpike_cli::apply_env_override(cfg);
  try {
    turnpike_cli::run(cfg, std::cout);
  } catch (const turnpike_cli::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const turnpike::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
