#pragma once

#include "nlqm/hilbert.hpp"
#include "nlqm/reduced.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <utility>

namespace nlqm {

/// Parameters of the closed-form two-vector solution. A_coeffs and B_coeffs are the
/// eigenbasis coefficients of two orthonormal solutions |A>, |B> of the linear equation.
struct AnalyticSolutionSpec {
  CVector A_coeffs;
  CVector B_coeffs;
  double omega0 = 1.0;
  double vartheta = 0.0;
  double theta = 0.0;
  Coupling g{};
  HermitianOperator H;
  double t0 = 0.0;
};

struct StatePair {
  StateVector psi;
  StateVector phi;
};

/// A spec that has passed validate_spec. Immutable.
class AnalyticSolution {
 public:
  const AnalyticSolutionSpec& spec() const noexcept { return spec_; }
  /// N = 2 omega0 cosh(2 vartheta)
  double norm() const noexcept { return norm_; }
  /// Residuals measured at validation time.
  double normalization_residual() const noexcept { return normalization_residual_; }
  double orthogonality_residual() const noexcept { return orthogonality_residual_; }
  ReducedParams reduced_params() const noexcept {
    return {spec_.omega0, spec_.theta, spec_.g, spec_.t0};
  }

 private:
  friend AnalyticSolution validate_spec(AnalyticSolutionSpec spec);
  explicit AnalyticSolution(AnalyticSolutionSpec spec) : spec_(std::move(spec)) {}

  AnalyticSolutionSpec spec_;
  double norm_ = 0.0;
  double normalization_residual_ = 0.0;
  double orthogonality_residual_ = 0.0;
};

/// Checks sum|A_n|^2 = sum|B_n|^2 = 1 and sum B_n^* A_n = 0 (both to 1e-10), omega0 > 0,
/// b != 0 and dimensions. Throws ValidationError naming the failed constraint.
AnalyticSolution validate_spec(AnalyticSolutionSpec spec);

enum class Channel { A, B };

/// Free evolution sum_n C_n e^{-i E_n t} |n> of the A or B channel (standard basis).
StateVector free_state(const AnalyticSolution& sol, Channel channel, double t);

/// The explicit pair
///   psi = gamma^{1/2} [ e^{ig w0 s} sinh(vt) |A> + e^{-ig w0 s} cosh(vt) |B> ]
///   phi = gamma*^{1/2} [ -e^{ig* w0 s} sinh(vt) |A> + e^{-ig* w0 s} cosh(vt) |B> ]
/// with s = t - t0 and gamma^{1/2} continued continuously from the principal root at t0.
StatePair state_pair_at(const AnalyticSolution& sol, double t);

/// Projections <A(t)|v>, <B(t)|v> onto the freely evolving channels (interaction picture).
struct ChannelAmplitudes {
  cplx on_A{0.0, 0.0};
  cplx on_B{0.0, 0.0};
};
ChannelAmplitudes interaction_projection(const AnalyticSolution& sol, const StateVector& v,
                                         double t);

enum class Direction { past, future };

/// Limiting interaction-picture form of psi and phi as t -> -inf (past) or +inf (future).
/// Each limit lies entirely in one channel. Which channel depends on sign(b): for b > 0 the
/// past has psi in A and phi in B; for b < 0 the roles of past and future are exchanged.
struct AsymptoticPair {
  Direction direction = Direction::past;
  Channel psi_channel = Channel::A;
  cplx psi_coefficient{0.0, 0.0};
  Channel phi_channel = Channel::B;
  cplx phi_coefficient{0.0, 0.0};

  /// Limit of psi as a channel-amplitude pair (zero in the empty channel).
  ChannelAmplitudes psi() const;
  ChannelAmplitudes phi() const;
};

AsymptoticPair asymptotic_pair(const AnalyticSolution& sol, Direction direction);

/// theta_hat = theta - (a / b) ln 2
double theta_hat(double theta, Coupling g);

struct SMatrix {
  Eigen::Matrix2cd entries;
  double theta_hat = 0.0;
};

/// Maps (psi_-, phi_-) to (psi_+, phi_+). For b > 0 this is [[0, e^{i th}], [-e^{-i th}, 0]];
/// for b < 0 past and future swap and the result is its inverse.
SMatrix s_matrix(double theta, Coupling g);
SMatrix s_matrix(const AnalyticSolution& sol);

/// rho(t) = (2 omega0 / N) [ sinh^2(vt) |A><A| + cosh^2(vt) |B><B| ].
DensityMatrix density_matrix_analytic(const AnalyticSolution& sol, double t);

/// Deterministic orthonormal pair (Gram-Schmidt on two seeded random vectors), for use as
/// A/B eigenbasis coefficients.
std::pair<CVector, CVector> random_orthonormal_pair(Eigen::Index dim, std::uint64_t seed);

/// Linear evolutions of two orthogonal vectors; an exact solution with gamma = 0.
/// Throws ValidationError if |<B|A>| > 1e-10 |A||B|.
StatePair exceptional_solution(const StateVector& A, const StateVector& B,
                               const HermitianOperator& H, double t);

}  // namespace nlqm
