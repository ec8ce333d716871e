#include "nlqm/appendix.hpp"

#include "nlqm/error.hpp"

#include <cmath>
#include <string>

namespace nlqm {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kConstraintTol = 1e-10;

}  // namespace

StateVector single_vector_real_g(const SingleVectorSpec& spec, double t) {
  if (spec.g.b != 0.0)
    throw WrongCaseError(
        "single_vector_real_g: g is complex (b != 0); only the norm law "
        "single_vector_complex_g_norm applies");
  if (spec.c_coeffs.size() != spec.H.dim())
    throw ContractViolation("single_vector_real_g: dimension mismatch");
  const double N0 = spec.c_coeffs.squaredNorm();
  if (!(N0 > 0.0)) throw ContractViolation("single_vector_real_g: sum |c_n|^2 must be > 0");
  CVector c(spec.c_coeffs.size());
  for (Eigen::Index n = 0; n < c.size(); ++n)
    c[n] = spec.c_coeffs[n] * std::polar(1.0, -(spec.H.eigenvalues()[n] + spec.g.a * N0) * t);
  return StateVector(spec.H.from_eigenbasis(c));
}

double single_vector_complex_g_norm(double b, double t0, double t) {
  if (b == 0.0) throw WrongCaseError("single_vector_complex_g_norm: b = 0 has constant norm");
  const double denom = 2.0 * b * (t - t0);
  if (!(denom < 0.0)) {
    throw ExistenceWindowError(
        "single_vector_complex_g_norm: 2 b (t - t0) = " + std::to_string(denom) +
        " >= 0; " +
        (b > 0.0 ? "for b > 0 the system ceases to exist after t = t0"
                 : "for b < 0 the system only exists after t = t0"));
  }
  return -1.0 / denom;
}

SingleVectorTrajectory integrate_single_vector(const StateVector& psi0, const HermitianOperator& H,
                                               Coupling g, std::span<const double> sample_times,
                                               const IntegratorConfig& config) {
  if (psi0.dim() != H.dim()) throw ContractViolation("integrate_single_vector: dimension mismatch");
  const Eigen::Index d = psi0.dim();
  const CMatrix& M = H.matrix();
  const cplx gv = g.value();
  const OdeRhs rhs = [&](double, std::span<const double> y, std::span<double> dy) {
    Eigen::Map<const CVector> p(reinterpret_cast<const cplx*>(y.data()), d);
    Eigen::Map<CVector> dp(reinterpret_cast<cplx*>(dy.data()), d);
    dp.noalias() = -kI * (M * p + (gv * p.squaredNorm()) * p);
  };
  std::vector<double> y0(static_cast<std::size_t>(2 * d));
  Eigen::Map<CVector>(reinterpret_cast<cplx*>(y0.data()), d) = psi0.amplitudes();

  OdeSolution sol = solve_ode(rhs, y0, sample_times, config);
  SingleVectorTrajectory out;
  out.times.assign(sample_times.begin(), sample_times.end());
  out.stats = sol.stats;
  for (const auto& y : sol.states) {
    CVector v = Eigen::Map<const CVector>(reinterpret_cast<const cplx*>(y.data()), d);
    out.norms.push_back(v.squaredNorm());
    out.states.emplace_back(std::move(v), psi0.basis());
  }
  return out;
}

KForms real_g_k_forms(double tau0, double delta0) {
  if (!(delta0 > 0.0) || !std::isfinite(delta0) || !std::isfinite(tau0))
    throw ContractViolation("real_g_k: delta0 must be finite and > 0");
  const double w0 = std::sqrt(0.25 * tau0 * tau0 + delta0);
  const double sd = std::sqrt(delta0);
  return {sd / (w0 + 0.5 * tau0), (w0 - 0.5 * tau0) / sd};
}

double real_g_k(double tau0, double delta0) {
  const KForms k = real_g_k_forms(tau0, delta0);
  // Each form loses accuracy to cancellation for one sign of tau0.
  return tau0 >= 0.0 ? k.from_delta : k.from_tau;
}

RealGSolution validate_real_g(RealGSpec spec) {
  const auto dim = spec.H.dim();
  if (spec.A_coeffs.size() != dim || spec.B_coeffs.size() != dim)
    throw ValidationError("dimension", 0.0, "coefficients must match the Hamiltonian dimension");
  if (!std::isfinite(spec.g_real)) throw ValidationError("finiteness", 0.0, "non-finite g");
  if (!(spec.delta0 > 0.0)) throw ValidationError("delta0 > 0", spec.delta0, "delta0 must be > 0");
  const double gres = std::abs(std::norm(spec.gamma0) - spec.delta0);
  if (gres > kConstraintTol * std::max(1.0, spec.delta0))
    throw ValidationError("|gamma0|^2 = delta0", gres, "gamma0 inconsistent with delta0");
  const double orth = std::abs(spec.B_coeffs.dot(spec.A_coeffs));
  if (orth > kConstraintTol)
    throw ValidationError("orthogonality sum B_n^* A_n = 0", orth, "A and B are not orthogonal");
  const double k = real_g_k(spec.tau0, spec.delta0);
  const double norm_res =
      std::abs(k * spec.B_coeffs.squaredNorm() - spec.A_coeffs.squaredNorm() / k - 1.0);
  if (norm_res > kConstraintTol)
    throw ValidationError("normalization sum(k|B_n|^2 - |A_n|^2/k) = 1", norm_res,
                          "k = " + std::to_string(k));

  RealGSolution sol(std::move(spec));
  sol.k_ = k;
  sol.omega0_ = std::sqrt(0.25 * sol.spec_.tau0 * sol.spec_.tau0 + sol.spec_.delta0);
  return sol;
}

cplx real_g_gamma(const RealGSolution& sol, double t) {
  const auto& s = sol.spec();
  return s.gamma0 * std::polar(1.0, s.g_real * s.tau0 * t);
}

StatePair real_g_state_pair(const RealGSolution& sol, double t) {
  const auto& s = sol.spec();
  const double k = sol.k();
  const double w = s.g_real * sol.omega0() * t;
  const cplx root = std::sqrt(s.gamma0) * std::polar(1.0, 0.5 * s.g_real * s.tau0 * t);
  const cplx up = std::polar(1.0, w);
  const cplx down = std::polar(1.0, -w);

  CVector psi_hat(s.A_coeffs.size()), phi_hat(s.A_coeffs.size());
  for (Eigen::Index n = 0; n < psi_hat.size(); ++n) {
    const cplx free = std::polar(1.0, -s.H.eigenvalues()[n] * t);
    psi_hat[n] = root * (s.A_coeffs[n] * up + s.B_coeffs[n] * down) * free;
    phi_hat[n] = std::conj(root) * (-s.A_coeffs[n] / k * up + k * s.B_coeffs[n] * down) * free;
  }
  return {StateVector(s.H.from_eigenbasis(psi_hat)), StateVector(s.H.from_eigenbasis(phi_hat))};
}

}  // namespace nlqm
