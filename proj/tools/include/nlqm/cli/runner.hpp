#pragma once

#include "nlqm/cli/config.hpp"
#include "nlqm/cli/table.hpp"
#include "nlqm/integrator.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nlqm::cli {

enum ExitCode : int { kSuccess = 0, kCheckFailure = 1, kConfigError = 2, kNumericalFailure = 3 };

struct CheckResult {
  std::string name;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool passed = false;
};

/// One row of the verification suite.
struct VerifyCheck {
  std::string suite;
  std::string name;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool passed = false;
};

struct RunReport {
  Mode mode = Mode::analytic;
  std::string status = "ok";  // ok | check_failure | integration_failure
  std::string message;
  std::optional<double> last_good_time;

  Table trajectory;   // t, state components, observables
  Table observables;  // t and observables only
  DriftReport drift;
  std::optional<double> oracle_deviation;
  std::string oracle_description;
  double max_abs_gamma = 0.0;
  OdeStats stats;

  std::vector<CheckResult> checks;
  std::vector<VerifyCheck> verify;

  int exit_code() const noexcept;
};

/// Fixed column order: t, Re/Im psi_n for every n, Re/Im phi_n for every n, then observables.
std::vector<std::string> trajectory_columns(std::size_t dim);
const std::vector<std::string>& observable_columns();

/// Builds the Hamiltonian described by the config (reads the file for the file form).
HermitianOperator build_hamiltonian(const HamiltonianSource& source);

/// Runs the configured simulation in memory. Integration failures are reported through
/// status/last_good_time; config-level problems throw ConfigError.
RunReport simulate(const RunConfig& config);

/// Writes trajectory.csv, observables.csv, drift.json and plots.svg (per output formats).
void write_artifacts(const RunConfig& config, const RunReport& report);

/// simulate + write_artifacts + a short summary on `log`; returns the exit code.
/// Never throws for configuration problems: they are reported on `err` with exit code 2.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

/// Runs a verification suite: all | reduced | analytic | integrator | appendix | spatial.
std::vector<VerifyCheck> run_verify_suite(const std::string& suite);

void print_verify_table(std::ostream& out, const std::vector<VerifyCheck>& checks);

/// Loads a comparison source: a .csv file, or a config that is simulated in memory.
Table load_comparison_source(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides);

/// "key=v1,v2;key2=v3" -> list of (key, values).
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};
std::vector<SweepAxis> parse_grid(std::string_view spec);

/// Worker count: NLQM_THREADS if set (must be a positive integer), else hardware
/// concurrency; never more than `jobs`.
std::size_t worker_count(std::size_t jobs);

/// Runs the Cartesian product of the grid, each into <output_dir>/run_NNNN, and writes
/// <output_dir>/sweep.csv. Returns the worst exit code.
int sweep(const RunConfig& base, const std::vector<SweepAxis>& grid, std::ostream& log,
          std::ostream& err);

}  // namespace nlqm::cli
