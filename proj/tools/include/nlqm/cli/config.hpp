#pragma once

#include "nlqm/error.hpp"
#include "nlqm/hilbert.hpp"
#include "nlqm/integrator.hpp"
#include "nlqm/ode.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlqm::cli {

/// Bad configuration text or value. The message carries the line or flag that caused it.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Mode { analytic, nonlinear, linearized, reduced, spatial, appendix_a, appendix_b, verify };

std::string_view to_string(Mode m) noexcept;

struct HamiltonianSource {
  enum class Kind { random, diagonal, file };
  Kind kind = Kind::random;
  Eigen::Index dim = 4;
  std::uint64_t seed = 42;
  std::vector<double> energies;
  std::filesystem::path path;

  std::string describe() const;
};

/// Everything a single run needs. Defaults reproduce the reference scenario:
/// random dim-4 H (seed 42), g = 1 + 0.5i, omega0 = 1, vartheta = 0.3, theta = 0.7, t in [-2, 2].
struct RunConfig {
  Mode mode = Mode::analytic;
  HamiltonianSource hamiltonian;
  Coupling coupling{1.0, 0.5};

  // Closed-form solution parameters and the A/B channels (eigenbasis coefficients).
  double omega0 = 1.0;
  double vartheta = 0.3;
  double theta = 0.7;
  double t0 = 0.0;
  std::uint64_t pair_seed = 7;
  std::optional<CVector> A;
  std::optional<CVector> B;
  std::string init = "analytic";  // analytic | orthogonal

  double t_start = -2.0;
  double t_end = 2.0;
  std::size_t n_samples = 81;

  IntegratorConfig integrator;
  RhsVariant rhs_variant = RhsVariant::derived;

  // spatial
  double x_min = -3.141592653589793;
  double x_max = 3.141592653589793;
  std::size_t n_points = 256;
  double dt = 1e-3;
  std::vector<int> modes{1, 3};

  // appendix cases
  double appendix_t0 = 0.0;
  double appendix_norm = 1.0;  // initial <psi|psi> for the real-g single vector
  double tau0 = 0.5;
  double delta0 = 1.0;
  double gamma0_phase = 0.0;
  double alpha = 0.5;  // |A| scale for the real-g pair; |B| follows from the constraint

  std::string verify_suite = "all";

  /// Requested checks: name -> upper bound. Exit status 1 if any is exceeded.
  std::map<std::string, double> checks;

  std::filesystem::path output_dir = "nlqm_out";
  bool write_csv = true;
  bool write_json = true;
  bool write_svg = false;

  /// Throws ConfigError for cross-field inconsistencies (t_end <= t_start, n_samples < 2, ...).
  void validate() const;
};

/// Parses "key = value" lines ('#' starts a comment). Diagnostics name the line.
RunConfig parse_config(std::string_view text, std::string_view source_name = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Applies "key=value" on top of an existing config (the --set flag).
void apply_override(RunConfig& config, std::string_view assignment);

/// Sets one key; throws ConfigError naming the key on failure.
void set_key(RunConfig& config, std::string_view key, std::string_view value);

/// All accepted keys, for documentation and `nlqm keys`.
std::vector<std::string> known_keys();

/// Parses complex literals such as "1", "-0.5i", "0.3+0.4i", "2e-3-1i".
cplx parse_complex(std::string_view text);

}  // namespace nlqm::cli
