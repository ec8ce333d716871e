#pragma once

#include "nlqm/hilbert.hpp"
#include "nlqm/ode.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nlqm {

/// Parameters of the closed-form reduced solution. t0 is the origin of time.
struct ReducedParams {
  double omega0 = 1.0;
  double theta = 0.0;
  Coupling g{};
  double t0 = 0.0;

  /// Throws ContractViolation unless omega0 > 0, b != 0 and everything is finite.
  void validate() const;
};

struct ReducedDerivative {
  double dN = 0.0;
  double dtau = 0.0;
  cplx dgamma{0.0, 0.0};
  double ddelta = 0.0;
};

/// (dN, dtau, dgamma, ddelta) = (0, 4 b delta, i g gamma tau, -2 b tau delta).
ReducedDerivative reduced_rhs(const ReducedState& state, Coupling g);

struct TauDelta {
  double tau = 0.0;
  double delta = 0.0;
};

/// xi = 2 b omega0 (t - t0). Shared by every closed form below.
double reduced_xi(const ReducedParams& p, double t);

/// log(cosh^2 xi), stable for |xi| far beyond the cosh overflow threshold.
double log_cosh_squared(double xi);

/// log(sech xi), same stability.
double log_sech(double xi);

/// tau = 2 omega0 tanh xi, delta = omega0^2 sech^2 xi.
TauDelta tau_delta_analytic(const ReducedParams& p, double t);

/// gamma = omega0 sech(xi) exp(i varphi), varphi = theta + (a / 2b) log cosh^2 xi.
cplx gamma_analytic(const ReducedParams& p, double t);

/// The phase varphi(t) of gamma, continuous in t.
double gamma_phase(const ReducedParams& p, double t);

/// gamma^{1/2}: the principal root at t = t0, continued continuously in t.
cplx gamma_sqrt_analytic(const ReducedParams& p, double t);

/// Positive root of tau^2/4 + delta. Throws ContractViolation if the radicand is
/// negative beyond rounding.
double omega0_from_state(const ReducedState& state);

enum class BranchKind { tanh_physical, coth_singular, tan_imaginary_lambda };
enum class BranchSelector { tanh, coth };

std::string_view to_string(BranchKind kind) noexcept;

struct BranchReport {
  BranchKind kind = BranchKind::tanh_physical;
  bool physical = true;
  std::string reason;
};

/// Classifies a solution family of  tau' + b tau^2 = b lambda^2.
BranchReport classify_branch(double lambda_squared, BranchSelector branch);

struct ReducedTrajectory {
  std::vector<double> times;
  std::vector<ReducedState> states;
  OdeStats stats;
};

/// Integrates the reduced system with state (N, tau, Re gamma, Im gamma); delta is
/// always recomputed as |gamma|^2.
ReducedTrajectory integrate_reduced(const ReducedState& initial, Coupling g,
                                    std::span<const double> sample_times,
                                    const IntegratorConfig& config);

}  // namespace nlqm
