#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>

namespace nlqm {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline const std::string kStandardBasis = "standard";

/// Finite-dimensional complex amplitude vector tagged with the basis it refers to.
class StateVector {
 public:
  explicit StateVector(CVector amplitudes, std::string basis = kStandardBasis);
  StateVector(std::initializer_list<cplx> amplitudes);

  const CVector& amplitudes() const noexcept { return amplitudes_; }
  const std::string& basis() const noexcept { return basis_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }
  cplx operator[](Eigen::Index i) const { return amplitudes_[i]; }

  /// <v|v>
  double norm_squared() const noexcept { return amplitudes_.squaredNorm(); }

 private:
  CVector amplitudes_;
  std::string basis_;
};

StateVector operator+(const StateVector& u, const StateVector& v);
StateVector operator-(const StateVector& u, const StateVector& v);
StateVector operator*(cplx s, const StateVector& v);

/// Hermitian matrix together with its (cached) spectral decomposition.
///
/// Eigenvalues are ascending. Each eigenvector column is rotated so that its first
/// non-negligible component is real and positive, which makes fixtures reproducible.
/// Construction rejects matrices with max|M - M^dagger| > 1e-10 * max|M|.
class HermitianOperator {
 public:
  explicit HermitianOperator(CMatrix matrix);

  static HermitianOperator diagonal(std::span<const double> energies);
  static HermitianOperator diagonal(std::initializer_list<double> energies);

  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  const CMatrix& matrix() const noexcept { return matrix_; }
  const RVector& eigenvalues() const noexcept { return eigenvalues_; }
  const CMatrix& eigenvectors() const noexcept { return eigenvectors_; }

  /// Components of v in the eigenbasis, U^dagger v.
  CVector to_eigenbasis(const CVector& v) const;
  /// U c
  CVector from_eigenbasis(const CVector& c) const;
  /// exp(-i H t) v via the spectral form.
  CVector propagate(const CVector& v, double t) const;

 private:
  HermitianOperator(CMatrix matrix, RVector eigenvalues, CMatrix eigenvectors);

  CMatrix matrix_;
  RVector eigenvalues_;
  CMatrix eigenvectors_;
};

/// Complex coupling g = a + i b.
struct Coupling {
  double a = 0.0;
  double b = 0.0;

  cplx value() const noexcept { return {a, b}; }
  cplx conj() const noexcept { return {a, -b}; }
};

/// Pair observables N, tau, gamma, delta.
struct ReducedState {
  double N = 0.0;
  double tau = 0.0;
  cplx gamma{0.0, 0.0};
  double delta = 0.0;

  /// tau^2 / 4 + delta
  double omega0_squared() const noexcept { return 0.25 * tau * tau + delta; }
};

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
 public:
  /// Validates hermiticity, trace and positivity to `tolerance`.
  explicit DensityMatrix(CMatrix matrix, double tolerance = 1e-10);

  const CMatrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  /// Ascending eigenvalues.
  RVector eigenvalues() const;

 private:
  CMatrix matrix_;
};

cplx inner_product(const StateVector& u, const StateVector& v);
ReducedState reduced_observables(const StateVector& psi, const StateVector& phi);
DensityMatrix density_matrix(const StateVector& psi, const StateVector& phi);
double schwarz_parameter(const StateVector& psi, const StateVector& phi);
double purity(const DensityMatrix& rho);
StateVector evolve_linear(const HermitianOperator& H, const StateVector& v0, double t);

/// Deterministic random Hermitian matrix (M + M^dagger)/2 with Re, Im of M uniform in [-1, 1).
HermitianOperator random_hermitian(Eigen::Index dim, std::uint64_t seed);

/// Deterministic random state with Re, Im uniform in [-1, 1), normalised to unit norm.
StateVector random_state(Eigen::Index dim, std::uint64_t seed);

}  // namespace nlqm
