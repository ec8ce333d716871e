#include "nlqm/reduced.hpp"

#include "nlqm/error.hpp"

#include <cmath>
#include <numbers>

namespace nlqm {

void ReducedParams::validate() const {
  if (!std::isfinite(omega0) || !std::isfinite(theta) || !std::isfinite(g.a) ||
      !std::isfinite(g.b) || !std::isfinite(t0))
    throw ContractViolation("ReducedParams: non-finite parameter");
  if (!(omega0 > 0.0)) throw ContractViolation("ReducedParams: omega0 must be > 0");
  if (g.b == 0.0)
    throw ContractViolation("ReducedParams: Im g = b must be nonzero (b = 0 is the real-g case)");
}

ReducedDerivative reduced_rhs(const ReducedState& s, Coupling g) {
  ReducedDerivative d;
  d.dN = 0.0;
  d.dtau = 4.0 * g.b * s.delta;
  d.dgamma = cplx(0.0, 1.0) * g.value() * s.gamma * s.tau;
  d.ddelta = -2.0 * g.b * s.tau * s.delta;
  return d;
}

double reduced_xi(const ReducedParams& p, double t) { return 2.0 * p.g.b * p.omega0 * (t - p.t0); }

double log_cosh_squared(double xi) {
  const double x = std::abs(xi);
  return 2.0 * (x + std::log1p(std::exp(-2.0 * x)) - std::numbers::ln2);
}

double log_sech(double xi) {
  const double x = std::abs(xi);
  return -x - std::log1p(std::exp(-2.0 * x)) + std::numbers::ln2;
}

TauDelta tau_delta_analytic(const ReducedParams& p, double t) {
  p.validate();
  const double xi = reduced_xi(p, t);
  return {2.0 * p.omega0 * std::tanh(xi), p.omega0 * p.omega0 * std::exp(2.0 * log_sech(xi))};
}

double gamma_phase(const ReducedParams& p, double t) {
  p.validate();
  return p.theta + p.g.a / (2.0 * p.g.b) * log_cosh_squared(reduced_xi(p, t));
}

cplx gamma_analytic(const ReducedParams& p, double t) {
  const double xi = reduced_xi(p, t);
  return std::polar(p.omega0 * std::exp(log_sech(xi)), gamma_phase(p, t));
}

cplx gamma_sqrt_analytic(const ReducedParams& p, double t) {
  p.validate();
  // Principal argument of gamma(t0) = omega0 e^{i theta}, in (-pi, pi].
  double principal = std::remainder(p.theta, 2.0 * std::numbers::pi);
  if (principal <= -std::numbers::pi) principal = std::numbers::pi;
  const double xi = reduced_xi(p, t);
  const double phase = principal + p.g.a / (2.0 * p.g.b) * log_cosh_squared(xi);
  return std::polar(std::exp(0.5 * (std::log(p.omega0) + log_sech(xi))), 0.5 * phase);
}

double omega0_from_state(const ReducedState& s) {
  const double radicand = s.omega0_squared();
  const double scale = 0.25 * s.tau * s.tau + std::abs(s.delta);
  if (radicand < -1e-12 * std::max(1.0, scale))
    throw ContractViolation("omega0_from_state: tau^2/4 + delta = " + std::to_string(radicand) +
                            " is negative; inconsistent reduced state");
  return std::sqrt(std::max(radicand, 0.0));
}

std::string_view to_string(BranchKind kind) noexcept {
  switch (kind) {
    case BranchKind::tanh_physical:
      return "tanh_physical";
    case BranchKind::coth_singular:
      return "coth_singular";
    case BranchKind::tan_imaginary_lambda:
      return "tan_imaginary_lambda";
  }
  return "unknown";
}

BranchReport classify_branch(double lambda_squared, BranchSelector branch) {
  if (!std::isfinite(lambda_squared)) throw ContractViolation("classify_branch: non-finite lambda^2");
  if (lambda_squared < 0.0) {
    return {BranchKind::tan_imaginary_lambda, false,
            "unphysical: imaginary lambda gives tau = -|lambda| tan(b |lambda| (t - c2)), which "
            "blows up at finite time"};
  }
  if (branch == BranchSelector::coth) {
    return {BranchKind::coth_singular, false,
            "unphysical: coth branch gives delta = -omega0^2 cosech^2(2 b omega0 t) < 0 and tau "
            "singular at t = t0"};
  }
  if (lambda_squared == 0.0) {
    return {BranchKind::tanh_physical, true,
            "degenerate: lambda = 0 collapses the tanh branch to the fixed line tau = 0, "
            "delta = 0 (orthogonal pair)"};
  }
  return {BranchKind::tanh_physical, true,
          "physical: tau = 2 omega0 tanh(2 b omega0 t) is bounded and delta = omega0^2 "
          "sech^2(2 b omega0 t) > 0"};
}

ReducedTrajectory integrate_reduced(const ReducedState& initial, Coupling g,
                                    std::span<const double> sample_times,
                                    const IntegratorConfig& config) {
  if (g.b == 0.0) throw ContractViolation("integrate_reduced: b must be nonzero");
  const double residual = std::abs(initial.delta - std::norm(initial.gamma));
  if (residual > 1e-10 * std::max(1.0, initial.delta))
    throw ContractViolation("integrate_reduced: initial delta != |gamma|^2 (residual " +
                            std::to_string(residual) + ")");

  const std::vector<double> y0{initial.N, initial.tau, initial.gamma.real(), initial.gamma.imag()};
  const cplx ig = cplx(0.0, 1.0) * g.value();
  const OdeRhs rhs = [&](double, std::span<const double> y, std::span<double> dy) {
    const cplx gamma(y[2], y[3]);
    const double delta = std::norm(gamma);
    const cplx dgamma = ig * gamma * y[1];
    dy[0] = 0.0;
    dy[1] = 4.0 * g.b * delta;
    dy[2] = dgamma.real();
    dy[3] = dgamma.imag();
  };

  OdeSolution sol = solve_ode(rhs, y0, sample_times, config);
  ReducedTrajectory out;
  out.times.assign(sample_times.begin(), sample_times.end());
  out.stats = sol.stats;
  out.states.reserve(sol.states.size());
  for (const auto& y : sol.states) {
    ReducedState s;
    s.N = y[0];
    s.tau = y[1];
    s.gamma = cplx(y[2], y[3]);
    s.delta = std::norm(s.gamma);
    out.states.push_back(s);
  }
  return out;
}

}  // namespace nlqm
