#include "nlqm/cli/config.hpp"
#include "nlqm/cli/runner.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>

namespace {

using namespace nlqm;
using namespace nlqm::cli;

// Maps library exceptions raised outside `run` onto the documented exit codes.
template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << '\n';
    return kConfigError;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const WrongCaseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ExistenceWindowError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

RunConfig load_with_overrides(const std::string& path, const std::vector<std::string>& sets) {
  RunConfig config = load_config(path);
  for (const auto& s : sets) apply_override(config, s);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nlqm: coupled nonlinear state-vector pairs, simulation and verification"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;

  auto* run_cmd = app.add_subcommand("run", "Run a configured simulation and write artifacts");
  run_cmd->add_option("config", config_path, "Config file (key = value lines)")->required();
  run_cmd->add_option("--set", sets, "Override a config key (key=value), repeatable");

  std::string suite = "all";
  auto* verify_cmd = app.add_subcommand("verify", "Run the invariant verification suite");
  verify_cmd->add_option("--suite", suite, "all|reduced|analytic|integrator|appendix|spatial")
      ->check(CLI::IsMember({"all", "reduced", "analytic", "integrator", "appendix", "spatial"}));

  std::string source_a, source_b, field = "all";
  std::vector<std::string> sets_a, sets_b;
  double tol = -1.0;
  auto* compare_cmd =
      app.add_subcommand("compare", "Max |a - b| per column between two runs or CSV files");
  compare_cmd->add_option("a", source_a, "Config file or trajectory CSV")->required();
  compare_cmd->add_option("b", source_b, "Config file or trajectory CSV")->required();
  compare_cmd->add_option("--field", field, "Column name, psi, phi or all");
  compare_cmd->add_option("--set-a", sets_a, "Override for config a (key=value)");
  compare_cmd->add_option("--set-b", sets_b, "Override for config b (key=value)");
  compare_cmd->add_option("--tol", tol, "Exit 1 if any deviation exceeds this bound");

  std::string grid_spec;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the Cartesian product of parameter values");
  sweep_cmd->add_option("config", config_path, "Base config file")->required();
  sweep_cmd->add_option("--grid", grid_spec, "key=v1,v2;key2=v3,v4")->required();
  sweep_cmd->add_option("--set", sets, "Override a base config key (key=value)");

  auto* keys_cmd = app.add_subcommand("keys", "List accepted config keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  if (*run_cmd) {
    return guarded([&] {
      const RunConfig config = load_with_overrides(config_path, sets);
      return run(config, std::cout, std::cerr);
    });
  }
  if (*verify_cmd) {
    return guarded([&] {
      const auto checks = run_verify_suite(suite);
      print_verify_table(std::cout, checks);
      for (const auto& c : checks)
        if (!c.passed) return static_cast<int>(kCheckFailure);
      return static_cast<int>(kSuccess);
    });
  }
  if (*compare_cmd) {
    return guarded([&] {
      const Table a = load_comparison_source(source_a, sets_a);
      const Table b = load_comparison_source(source_b, sets_b);
      const auto devs = compare_tables(a, b, field);
      int code = kSuccess;
      for (const auto& d : devs) {
        std::cout << std::left << std::setw(14) << d.column << ' ' << std::setprecision(6)
                  << std::scientific << d.max_abs << std::defaultfloat << '\n';
        if (tol >= 0.0 && !(d.max_abs <= tol)) code = kCheckFailure;
      }
      return code;
    });
  }
  if (*sweep_cmd) {
    return guarded([&] {
      const RunConfig base = load_with_overrides(config_path, sets);
      return sweep(base, parse_grid(grid_spec), std::cout, std::cerr);
    });
  }
  if (*keys_cmd) {
    for (const auto& k : known_keys()) std::cout << k << '\n';
    return kSuccess;
  }
  return kConfigError;
}
