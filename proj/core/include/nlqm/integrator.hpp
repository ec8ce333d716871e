#pragma once

#include "nlqm/hilbert.hpp"
#include "nlqm/ode.hpp"

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace nlqm {

/// Which form of the phi equation to integrate.
///   derived: i phi' = H phi + g* <psi|phi> psi   (consistent with the reduced equations)
///   printed: i phi' = H phi + g* <psi|psi> phi   (literal alternative, for comparison)
enum class RhsVariant { derived, printed };

std::string_view to_string(RhsVariant v) noexcept;
RhsVariant rhs_variant_from_string(std::string_view name);

struct PairDerivative {
  CVector dpsi;
  CVector dphi;
};

/// dpsi = -i (H psi + g <phi|psi> phi),  dphi = -i (H phi + g* <psi|phi> psi).
PairDerivative nonlinear_rhs(const StateVector& psi, const StateVector& phi,
                             const HermitianOperator& H, Coupling g,
                             RhsVariant variant = RhsVariant::derived);

/// Maximum deviations along a trajectory, relative to the first sample.
struct DriftReport {
  double max_rel_N_drift = 0.0;          // max |N(t) - N(t0)| / N(t0)
  double max_omega0_sq_drift = 0.0;      // max |w0^2(t) - w0^2(t0)|
  double max_delta_residual = 0.0;       // max |delta - |gamma|^2|
  double max_schwarz_drift = 0.0;        // max |S(t) - S(t0)|
  double max_purity_residual = 0.0;      // max |Tr rho^2 - (1 - 2 S / N^2)|
};

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> psi_states;
  std::vector<StateVector> phi_states;
  std::vector<ReducedState> observables;
  std::vector<double> schwarz;
  std::vector<double> purity;
  DriftReport drift;
  OdeStats stats;
};

/// Builds observables and the drift report for a sequence of state pairs.
Trajectory make_trajectory(std::vector<double> times, std::vector<StateVector> psi,
                           std::vector<StateVector> phi);

/// Integrates the coupled nonlinear pair from (psi0, phi0) at sample_times.front().
Trajectory integrate(const StateVector& psi0, const StateVector& phi0, const HermitianOperator& H,
                     Coupling g, std::span<const double> sample_times,
                     const IntegratorConfig& config, RhsVariant variant = RhsVariant::derived);

using GammaFunction = std::function<cplx(double)>;

/// Integrates i psi' = H psi + g gamma(t) phi,  i phi' = H phi + g* gamma*(t) psi with a
/// prescribed gamma(t).
Trajectory integrate_linearized(const StateVector& psi0, const StateVector& phi0,
                                const HermitianOperator& H, Coupling g,
                                const GammaFunction& gamma_fn,
                                std::span<const double> sample_times,
                                const IntegratorConfig& config);

}  // namespace nlqm
