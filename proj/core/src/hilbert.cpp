#include "nlqm/hilbert.hpp"

#include "nlqm/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace nlqm {

namespace {

void require_compatible(const StateVector& u, const StateVector& v, const char* op) {
  if (u.dim() != v.dim()) {
    throw ContractViolation(std::string(op) + ": dimension mismatch (" + std::to_string(u.dim()) +
                            " vs " + std::to_string(v.dim()) + ")");
  }
  if (u.basis() != v.basis()) {
    throw ContractViolation(std::string(op) + ": basis mismatch ('" + u.basis() + "' vs '" +
                            v.basis() + "')");
  }
}

// Uniform double in [-1, 1) from the top 53 bits; independent of the standard library's
// distribution implementations so fixtures are identical across toolchains.
double symmetric_unit(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

// Rotate each column so its first non-negligible component is real and positive.
void fix_phases(CMatrix& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    const double scale = vectors.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const cplx c = vectors(i, j);
      if (std::abs(c) > 1e-12 * scale) {
        vectors.col(j) *= std::conj(c) / std::abs(c);
        vectors(i, j) = std::abs(c);
        break;
      }
    }
  }
}

bool is_exactly_diagonal(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != cplx(0.0, 0.0)) return false;
  return true;
}

}  // namespace

StateVector::StateVector(CVector amplitudes, std::string basis)
    : amplitudes_(std::move(amplitudes)), basis_(std::move(basis)) {
  if (amplitudes_.size() < 1) throw ContractViolation("StateVector: dimension must be >= 1");
  if (!amplitudes_.allFinite()) throw ContractViolation("StateVector: non-finite amplitude");
}

StateVector::StateVector(std::initializer_list<cplx> amplitudes)
    : StateVector(Eigen::Map<const CVector>(amplitudes.begin(),
                                            static_cast<Eigen::Index>(amplitudes.size()))) {}

StateVector operator+(const StateVector& u, const StateVector& v) {
  require_compatible(u, v, "operator+");
  return StateVector(u.amplitudes() + v.amplitudes(), u.basis());
}

StateVector operator-(const StateVector& u, const StateVector& v) {
  require_compatible(u, v, "operator-");
  return StateVector(u.amplitudes() - v.amplitudes(), u.basis());
}

StateVector operator*(cplx s, const StateVector& v) {
  return StateVector(s * v.amplitudes(), v.basis());
}

HermitianOperator::HermitianOperator(CMatrix matrix, RVector eigenvalues, CMatrix eigenvectors)
    : matrix_(std::move(matrix)),
      eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)) {}

HermitianOperator::HermitianOperator(CMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() < 1 || matrix_.rows() != matrix_.cols())
    throw ContractViolation("HermitianOperator: matrix must be square with dimension >= 1");
  if (!matrix_.allFinite()) throw ContractViolation("HermitianOperator: non-finite entry");

  const double scale = matrix_.cwiseAbs().maxCoeff();
  const double asym = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    throw ContractViolation("HermitianOperator: matrix is not Hermitian (max|M - M^dagger| = " +
                            std::to_string(asym) + ")");
  }

  const Eigen::Index n = matrix_.rows();
  if (is_exactly_diagonal(matrix_)) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) {
      return matrix_(l, l).real() < matrix_(r, r).real();
    });
    eigenvalues_.resize(n);
    eigenvectors_ = CMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto k = order[static_cast<std::size_t>(j)];
      eigenvalues_[j] = matrix_(k, k).real();
      eigenvectors_(k, j) = 1.0;
    }
    return;
  }

  // Decompose the exactly Hermitian part; the residual asymmetry is below tolerance.
  const CMatrix symmetric = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(symmetric);
  if (solver.info() != Eigen::Success)
    throw ContractViolation("HermitianOperator: eigendecomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
  fix_phases(eigenvectors_);
}

HermitianOperator HermitianOperator::diagonal(std::span<const double> energies) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(energies.size()),
                            static_cast<Eigen::Index>(energies.size()));
  for (std::size_t i = 0; i < energies.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    m(k, k) = energies[i];
  }
  return HermitianOperator(std::move(m));
}

HermitianOperator HermitianOperator::diagonal(std::initializer_list<double> energies) {
  return diagonal(std::span<const double>(energies.begin(), energies.size()));
}

CVector HermitianOperator::to_eigenbasis(const CVector& v) const {
  if (v.size() != dim()) throw ContractViolation("to_eigenbasis: dimension mismatch");
  return eigenvectors_.adjoint() * v;
}

CVector HermitianOperator::from_eigenbasis(const CVector& c) const {
  if (c.size() != dim()) throw ContractViolation("from_eigenbasis: dimension mismatch");
  return eigenvectors_ * c;
}

CVector HermitianOperator::propagate(const CVector& v, double t) const {
  CVector c = to_eigenbasis(v);
  for (Eigen::Index n = 0; n < c.size(); ++n) c[n] *= std::polar(1.0, -eigenvalues_[n] * t);
  return eigenvectors_ * c;
}

DensityMatrix::DensityMatrix(CMatrix matrix, double tolerance) : matrix_(std::move(matrix)) {
  if (matrix_.rows() < 1 || matrix_.rows() != matrix_.cols())
    throw ContractViolation("DensityMatrix: matrix must be square with dimension >= 1");
  const double asym = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tolerance) throw ContractViolation("DensityMatrix: not Hermitian");
  const cplx trace = matrix_.trace();
  if (std::abs(trace - 1.0) > tolerance) throw ContractViolation("DensityMatrix: trace != 1");
  if (eigenvalues().minCoeff() < -tolerance)
    throw ContractViolation("DensityMatrix: negative eigenvalue");
}

RVector DensityMatrix::eigenvalues() const {
  const CMatrix symmetric = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

cplx inner_product(const StateVector& u, const StateVector& v) {
  require_compatible(u, v, "inner_product");
  // Eigen's dot conjugates the first argument.
  return u.amplitudes().dot(v.amplitudes());
}

ReducedState reduced_observables(const StateVector& psi, const StateVector& phi) {
  require_compatible(psi, phi, "reduced_observables");
  const double pp = psi.norm_squared();
  const double ff = phi.norm_squared();
  ReducedState s;
  s.N = pp + ff;
  s.tau = pp - ff;
  s.gamma = inner_product(phi, psi);
  s.delta = std::norm(s.gamma);
  return s;
}

DensityMatrix density_matrix(const StateVector& psi, const StateVector& phi) {
  require_compatible(psi, phi, "density_matrix");
  const double N = psi.norm_squared() + phi.norm_squared();
  if (!(N > 0.0)) throw DegenerateInput("density_matrix: N = <psi|psi> + <phi|phi> is zero");
  CMatrix rho = (psi.amplitudes() * psi.amplitudes().adjoint() +
                 phi.amplitudes() * phi.amplitudes().adjoint()) /
                N;
  return DensityMatrix(std::move(rho));
}

double schwarz_parameter(const StateVector& psi, const StateVector& phi) {
  require_compatible(psi, phi, "schwarz_parameter");
  return psi.norm_squared() * phi.norm_squared() - std::norm(inner_product(psi, phi));
}

double purity(const DensityMatrix& rho) {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return rho.matrix().squaredNorm();
}

StateVector evolve_linear(const HermitianOperator& H, const StateVector& v0, double t) {
  if (H.dim() != v0.dim()) throw ContractViolation("evolve_linear: dimension mismatch");
  if (t == 0.0) return v0;
  return StateVector(H.propagate(v0.amplitudes(), t), v0.basis());
}

HermitianOperator random_hermitian(Eigen::Index dim, std::uint64_t seed) {
  if (dim < 1) throw ContractViolation("random_hermitian: dim must be >= 1");
  std::mt19937_64 rng(seed);
  CMatrix m(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double re = symmetric_unit(rng);
      const double im = symmetric_unit(rng);
      m(i, j) = cplx(re, im);
    }
  CMatrix h = (m + m.adjoint()) * 0.5;
  return HermitianOperator(std::move(h));
}

StateVector random_state(Eigen::Index dim, std::uint64_t seed) {
  if (dim < 1) throw ContractViolation("random_state: dim must be >= 1");
  std::mt19937_64 rng(seed);
  CVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double re = symmetric_unit(rng);
    const double im = symmetric_unit(rng);
    v[i] = cplx(re, im);
  }
  return StateVector(v / v.norm());
}

}  // namespace nlqm
