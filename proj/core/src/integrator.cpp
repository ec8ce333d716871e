#include "nlqm/integrator.hpp"

#include "nlqm/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nlqm {

namespace {

constexpr cplx kI{0.0, 1.0};

// The ODE state is [psi, phi] stored as interleaved (re, im) pairs; std::complex<double>
// arrays are layout-compatible with double[2] arrays.
Eigen::Map<const CVector> view(std::span<const double> y, Eigen::Index offset, Eigen::Index dim) {
  return {reinterpret_cast<const cplx*>(y.data()) + offset, dim};
}

Eigen::Map<CVector> view(std::span<double> y, Eigen::Index offset, Eigen::Index dim) {
  return {reinterpret_cast<cplx*>(y.data()) + offset, dim};
}

std::vector<double> flatten(const StateVector& psi, const StateVector& phi) {
  const auto d = psi.dim();
  std::vector<double> y(static_cast<std::size_t>(4 * d));
  view(std::span<double>(y), 0, d) = psi.amplitudes();
  view(std::span<double>(y), d, d) = phi.amplitudes();
  return y;
}

void check_inputs(const StateVector& psi0, const StateVector& phi0, const HermitianOperator& H,
                  const char* op) {
  if (psi0.dim() != phi0.dim() || psi0.dim() != H.dim())
    throw ContractViolation(std::string(op) + ": dimension mismatch");
  if (psi0.basis() != phi0.basis()) throw ContractViolation(std::string(op) + ": basis mismatch");
}

Trajectory unpack(std::span<const double> times, OdeSolution sol, Eigen::Index dim,
                  const std::string& basis) {
  std::vector<StateVector> psi, phi;
  psi.reserve(sol.states.size());
  phi.reserve(sol.states.size());
  for (const auto& y : sol.states) {
    psi.emplace_back(CVector(view(std::span<const double>(y), 0, dim)), basis);
    phi.emplace_back(CVector(view(std::span<const double>(y), dim, dim)), basis);
  }
  Trajectory tr = make_trajectory({times.begin(), times.end()}, std::move(psi), std::move(phi));
  tr.stats = sol.stats;
  return tr;
}

}  // namespace

std::string_view to_string(RhsVariant v) noexcept {
  return v == RhsVariant::derived ? "derived" : "printed";
}

RhsVariant rhs_variant_from_string(std::string_view name) {
  if (name == "derived") return RhsVariant::derived;
  if (name == "printed") return RhsVariant::printed;
  throw ContractViolation("unknown rhs variant '" + std::string(name) + "'");
}

PairDerivative nonlinear_rhs(const StateVector& psi, const StateVector& phi,
                             const HermitianOperator& H, Coupling g, RhsVariant variant) {
  check_inputs(psi, phi, H, "nonlinear_rhs");
  const CVector& p = psi.amplitudes();
  const CVector& f = phi.amplitudes();
  const cplx gamma = f.dot(p);  // <phi|psi>
  PairDerivative d;
  d.dpsi = -kI * (H.matrix() * p + g.value() * gamma * f);
  if (variant == RhsVariant::derived)
    d.dphi = -kI * (H.matrix() * f + g.conj() * std::conj(gamma) * p);
  else
    d.dphi = -kI * (H.matrix() * f + g.conj() * p.squaredNorm() * f);
  return d;
}

Trajectory make_trajectory(std::vector<double> times, std::vector<StateVector> psi,
                           std::vector<StateVector> phi) {
  if (times.size() != psi.size() || times.size() != phi.size())
    throw ContractViolation("make_trajectory: misaligned inputs");
  Trajectory tr;
  tr.times = std::move(times);
  tr.psi_states = std::move(psi);
  tr.phi_states = std::move(phi);
  tr.observables.reserve(tr.times.size());
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const auto& p = tr.psi_states[i];
    const auto& f = tr.phi_states[i];
    const ReducedState s = reduced_observables(p, f);
    const double S = schwarz_parameter(p, f);
    tr.observables.push_back(s);
    tr.schwarz.push_back(S);
    const double P = s.N > 0.0 ? purity(density_matrix(p, f)) : 1.0;
    tr.purity.push_back(P);
    if (s.N > 0.0)
      tr.drift.max_purity_residual =
          std::max(tr.drift.max_purity_residual, std::abs(P - (1.0 - 2.0 * S / (s.N * s.N))));
  }
  if (!tr.observables.empty()) {
    const ReducedState& s0 = tr.observables.front();
    const double S0 = tr.schwarz.front();
    for (std::size_t i = 0; i < tr.observables.size(); ++i) {
      const ReducedState& s = tr.observables[i];
      auto& d = tr.drift;
      if (s0.N > 0.0) d.max_rel_N_drift = std::max(d.max_rel_N_drift, std::abs(s.N - s0.N) / s0.N);
      d.max_omega0_sq_drift =
          std::max(d.max_omega0_sq_drift, std::abs(s.omega0_squared() - s0.omega0_squared()));
      d.max_delta_residual = std::max(d.max_delta_residual, std::abs(s.delta - std::norm(s.gamma)));
      d.max_schwarz_drift = std::max(d.max_schwarz_drift, std::abs(tr.schwarz[i] - S0));
    }
  }
  return tr;
}

Trajectory integrate(const StateVector& psi0, const StateVector& phi0, const HermitianOperator& H,
                     Coupling g, std::span<const double> sample_times,
                     const IntegratorConfig& config, RhsVariant variant) {
  check_inputs(psi0, phi0, H, "integrate");
  const Eigen::Index d = psi0.dim();
  const CMatrix& M = H.matrix();
  const cplx gv = g.value();
  const cplx gc = g.conj();

  const OdeRhs rhs = [&](double, std::span<const double> y, std::span<double> dy) {
    const auto p = view(y, 0, d);
    const auto f = view(y, d, d);
    auto dp = view(dy, 0, d);
    auto df = view(dy, d, d);
    const cplx gamma = f.dot(p);
    dp.noalias() = -kI * (M * p + (gv * gamma) * f);
    if (variant == RhsVariant::derived)
      df.noalias() = -kI * (M * f + (gc * std::conj(gamma)) * p);
    else
      df.noalias() = -kI * (M * f + (gc * p.squaredNorm()) * f);
  };

  const auto y0 = flatten(psi0, phi0);
  return unpack(sample_times, solve_ode(rhs, y0, sample_times, config), d, psi0.basis());
}

Trajectory integrate_linearized(const StateVector& psi0, const StateVector& phi0,
                                const HermitianOperator& H, Coupling g,
                                const GammaFunction& gamma_fn,
                                std::span<const double> sample_times,
                                const IntegratorConfig& config) {
  check_inputs(psi0, phi0, H, "integrate_linearized");
  if (!gamma_fn) throw ContractViolation("integrate_linearized: empty gamma function");
  const Eigen::Index d = psi0.dim();
  const CMatrix& M = H.matrix();
  const cplx gv = g.value();
  const cplx gc = g.conj();

  const OdeRhs rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
    const auto p = view(y, 0, d);
    const auto f = view(y, d, d);
    auto dp = view(dy, 0, d);
    auto df = view(dy, d, d);
    const cplx gamma = gamma_fn(t);
    dp.noalias() = -kI * (M * p + (gv * gamma) * f);
    df.noalias() = -kI * (M * f + (gc * std::conj(gamma)) * p);
  };

  const auto y0 = flatten(psi0, phi0);
  return unpack(sample_times, solve_ode(rhs, y0, sample_times, config), d, psi0.basis());
}

}  // namespace nlqm
