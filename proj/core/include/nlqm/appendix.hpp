#pragma once

#include "nlqm/analytic.hpp"
#include "nlqm/hilbert.hpp"
#include "nlqm/ode.hpp"

#include <span>
#include <vector>

namespace nlqm {

// ---------------------------------------------------------------------------
// Single state vector coupled to itself:  i psi' = H psi + g <psi|psi> psi
// ---------------------------------------------------------------------------

struct SingleVectorSpec {
  CVector c_coeffs;  // eigenbasis coefficients, sum |c_n|^2 = N0 > 0
  Coupling g{};
  double t0 = 0.0;
  HermitianOperator H;
};

/// psi(t) = sum_n c_n e^{-i (E_n + g N0) t} |n>, valid only for real g.
/// Throws WrongCaseError when b != 0.
StateVector single_vector_real_g(const SingleVectorSpec& spec, double t);

/// <psi|psi> = -1 / (2 b (t - t0)). Throws ExistenceWindowError unless 2 b (t - t0) < 0.
double single_vector_complex_g_norm(double b, double t0, double t);

struct SingleVectorTrajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  std::vector<double> norms;
  OdeStats stats;
};

/// Direct numerical integration of the single-vector equation.
SingleVectorTrajectory integrate_single_vector(const StateVector& psi0, const HermitianOperator& H,
                                               Coupling g, std::span<const double> sample_times,
                                               const IntegratorConfig& config);

// ---------------------------------------------------------------------------
// Two vectors with real coupling (b = 0)
// ---------------------------------------------------------------------------

struct KForms {
  double from_delta = 0.0;  // sqrt(delta) / (w0 + tau0/2)
  double from_tau = 0.0;    // (w0 - tau0/2) / sqrt(delta)
};

/// Both closed forms of k, with w0 = +sqrt(tau0^2/4 + delta0). Throws ContractViolation
/// unless delta0 > 0.
KForms real_g_k_forms(double tau0, double delta0);

/// k via the sqrt(delta) form, which has no cancellation for tau0 > 0. Use real_g_k_forms
/// to compare against the other form.
double real_g_k(double tau0, double delta0);

struct RealGSpec {
  CVector A_coeffs;  // eigenbasis coefficients
  CVector B_coeffs;
  double tau0 = 0.0;
  double delta0 = 1.0;
  cplx gamma0{1.0, 0.0};
  double g_real = 1.0;
  HermitianOperator H;
};

/// Spec that passed: |gamma0|^2 = delta0 > 0, sum B_n^* A_n = 0, and
/// sum (k |B_n|^2 - |A_n|^2 / k) = 1 (all to 1e-10).
class RealGSolution {
 public:
  const RealGSpec& spec() const noexcept { return spec_; }
  double k() const noexcept { return k_; }
  double omega0() const noexcept { return omega0_; }

 private:
  friend RealGSolution validate_real_g(RealGSpec spec);
  explicit RealGSolution(RealGSpec spec) : spec_(std::move(spec)) {}

  RealGSpec spec_;
  double k_ = 1.0;
  double omega0_ = 1.0;
};

RealGSolution validate_real_g(RealGSpec spec);

/// gamma(t) = gamma0 e^{i g tau0 t}
cplx real_g_gamma(const RealGSolution& sol, double t);

/// psi = gamma^{1/2} sum (A_n e^{i g w0 t} + B_n e^{-i g w0 t}) e^{-i E_n t} |n>
/// phi = gamma*^{1/2} sum (-A_n/k e^{i g w0 t} + k B_n e^{-i g w0 t}) e^{-i E_n t} |n>
StatePair real_g_state_pair(const RealGSolution& sol, double t);

}  // namespace nlqm
