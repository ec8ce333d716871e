#include "nlqm/analytic.hpp"

#include "nlqm/error.hpp"

#include <cmath>
#include <numbers>

namespace nlqm {

namespace {

constexpr double kConstraintTol = 1e-10;

// Principal argument of theta in (-pi, pi]; matches the branch of gamma^{1/2} at t0.
double principal_angle(double theta) {
  double p = std::remainder(theta, 2.0 * std::numbers::pi);
  if (p <= -std::numbers::pi) p = std::numbers::pi;
  return p;
}

}  // namespace

AnalyticSolution validate_spec(AnalyticSolutionSpec spec) {
  const auto dim = spec.H.dim();
  if (spec.A_coeffs.size() != dim || spec.B_coeffs.size() != dim)
    throw ValidationError("dimension", 0.0,
                          "A_coeffs and B_coeffs must match the Hamiltonian dimension " +
                              std::to_string(dim));
  if (!spec.A_coeffs.allFinite() || !spec.B_coeffs.allFinite())
    throw ValidationError("finiteness", 0.0, "non-finite coefficient");
  if (!(spec.omega0 > 0.0) || !std::isfinite(spec.omega0))
    throw ValidationError("omega0 > 0", spec.omega0, "omega0 must be positive and finite");
  if (spec.g.b == 0.0 || !std::isfinite(spec.g.a) || !std::isfinite(spec.g.b))
    throw ValidationError("b != 0", 0.0,
                          "the general two-vector solution needs Im g != 0; use the real-g case");
  if (!std::isfinite(spec.vartheta) || !std::isfinite(spec.theta) || !std::isfinite(spec.t0))
    throw ValidationError("finiteness", 0.0, "non-finite vartheta, theta or t0");

  const double resA = std::abs(spec.A_coeffs.squaredNorm() - 1.0);
  const double resB = std::abs(spec.B_coeffs.squaredNorm() - 1.0);
  if (resA > kConstraintTol)
    throw ValidationError("normalization sum|A_n|^2 = 1", resA, "A_coeffs is not normalized");
  if (resB > kConstraintTol)
    throw ValidationError("normalization sum|B_n|^2 = 1", resB, "B_coeffs is not normalized");
  const double orth = std::abs(spec.B_coeffs.dot(spec.A_coeffs));
  if (orth > kConstraintTol)
    throw ValidationError("orthogonality sum B_n^* A_n = 0", orth, "A and B are not orthogonal");

  AnalyticSolution sol(std::move(spec));
  sol.norm_ = 2.0 * sol.spec_.omega0 * std::cosh(2.0 * sol.spec_.vartheta);
  sol.normalization_residual_ = std::max(resA, resB);
  sol.orthogonality_residual_ = orth;
  return sol;
}

StateVector free_state(const AnalyticSolution& sol, Channel channel, double t) {
  const auto& spec = sol.spec();
  const CVector& c = channel == Channel::A ? spec.A_coeffs : spec.B_coeffs;
  CVector evolved(c.size());
  for (Eigen::Index n = 0; n < c.size(); ++n)
    evolved[n] = c[n] * std::polar(1.0, -spec.H.eigenvalues()[n] * t);
  return StateVector(spec.H.from_eigenbasis(evolved));
}

StatePair state_pair_at(const AnalyticSolution& sol, double t) {
  const auto& spec = sol.spec();
  const ReducedParams p = sol.reduced_params();
  const double s = t - spec.t0;
  const double xi = reduced_xi(p, t);
  // |gamma^{1/2}| combined with |e^{+-i g w0 s}| = e^{-+xi/2} in log space.
  const double log_half = 0.5 * (std::log(spec.omega0) + log_sech(xi));
  const double half_phase = std::arg(gamma_sqrt_analytic(p, t));
  const double free_phase = spec.g.a * spec.omega0 * s;

  const cplx psi_A = std::polar(std::exp(log_half - 0.5 * xi), half_phase + free_phase);
  const cplx psi_B = std::polar(std::exp(log_half + 0.5 * xi), half_phase - free_phase);
  const cplx phi_A = -std::polar(std::exp(log_half + 0.5 * xi), -half_phase + free_phase);
  const cplx phi_B = std::polar(std::exp(log_half - 0.5 * xi), -half_phase - free_phase);

  const double sh = std::sinh(spec.vartheta);
  const double ch = std::cosh(spec.vartheta);
  const CVector A = free_state(sol, Channel::A, t).amplitudes();
  const CVector B = free_state(sol, Channel::B, t).amplitudes();
  return {StateVector(psi_A * sh * A + psi_B * ch * B),
          StateVector(phi_A * sh * A + phi_B * ch * B)};
}

ChannelAmplitudes interaction_projection(const AnalyticSolution& sol, const StateVector& v,
                                         double t) {
  return {inner_product(free_state(sol, Channel::A, t), v),
          inner_product(free_state(sol, Channel::B, t), v)};
}

ChannelAmplitudes AsymptoticPair::psi() const {
  return psi_channel == Channel::A ? ChannelAmplitudes{psi_coefficient, 0.0}
                                   : ChannelAmplitudes{0.0, psi_coefficient};
}

ChannelAmplitudes AsymptoticPair::phi() const {
  return phi_channel == Channel::A ? ChannelAmplitudes{phi_coefficient, 0.0}
                                   : ChannelAmplitudes{0.0, phi_coefficient};
}

AsymptoticPair asymptotic_pair(const AnalyticSolution& sol, Direction direction) {
  const auto& spec = sol.spec();
  const double th = theta_hat(principal_angle(spec.theta), spec.g);
  const double amp = std::sqrt(2.0 * spec.omega0);
  const double sh = std::sinh(spec.vartheta);
  const double ch = std::cosh(spec.vartheta);
  // Sign of xi in the limit: past with b > 0 is xi -> -inf.
  const bool xi_negative = (direction == Direction::past) == (spec.g.b > 0.0);

  AsymptoticPair out;
  out.direction = direction;
  if (xi_negative) {
    out.psi_channel = Channel::A;
    out.psi_coefficient = std::polar(amp * sh, 0.5 * th);
    out.phi_channel = Channel::B;
    out.phi_coefficient = std::polar(amp * ch, -0.5 * th);
  } else {
    out.psi_channel = Channel::B;
    out.psi_coefficient = std::polar(amp * ch, 0.5 * th);
    out.phi_channel = Channel::A;
    out.phi_coefficient = -std::polar(amp * sh, -0.5 * th);
  }
  return out;
}

double theta_hat(double theta, Coupling g) {
  if (g.b == 0.0) throw ContractViolation("theta_hat: b must be nonzero");
  return theta - g.a / g.b * std::numbers::ln2;
}

SMatrix s_matrix(double theta, Coupling g) {
  SMatrix S;
  S.theta_hat = theta_hat(theta, g);
  const cplx e = std::polar(1.0, S.theta_hat);
  const double sign = g.b > 0.0 ? 1.0 : -1.0;
  S.entries << cplx(0.0, 0.0), sign * e, -sign * std::conj(e), cplx(0.0, 0.0);
  return S;
}

SMatrix s_matrix(const AnalyticSolution& sol) { return s_matrix(sol.spec().theta, sol.spec().g); }

DensityMatrix density_matrix_analytic(const AnalyticSolution& sol, double t) {
  const auto& spec = sol.spec();
  const CVector A = free_state(sol, Channel::A, t).amplitudes();
  const CVector B = free_state(sol, Channel::B, t).amplitudes();
  const double sh = std::sinh(spec.vartheta);
  const double ch = std::cosh(spec.vartheta);
  CMatrix rho = (2.0 * spec.omega0 / sol.norm()) *
                (sh * sh * (A * A.adjoint()) + ch * ch * (B * B.adjoint()));
  return DensityMatrix(std::move(rho));
}

std::pair<CVector, CVector> random_orthonormal_pair(Eigen::Index dim, std::uint64_t seed) {
  if (dim < 2) throw ContractViolation("random_orthonormal_pair: need dim >= 2");
  CVector A = random_state(dim, seed).amplitudes();
  CVector B = random_state(dim, seed + 0x9e3779b97f4a7c15ULL).amplitudes();
  B -= A.dot(B) * A;
  B -= A.dot(B) * A;  // second pass for orthogonality at rounding level
  B.normalize();
  return {std::move(A), std::move(B)};
}

StatePair exceptional_solution(const StateVector& A, const StateVector& B,
                               const HermitianOperator& H, double t) {
  const double overlap = std::abs(inner_product(B, A));
  const double scale = std::sqrt(A.norm_squared() * B.norm_squared());
  if (overlap > 1e-10 * scale)
    throw ValidationError("orthogonality <B|A> = 0", overlap,
                          "exceptional solutions need orthogonal vectors");
  return {evolve_linear(H, A, t), evolve_linear(H, B, t)};
}

}  // namespace nlqm
