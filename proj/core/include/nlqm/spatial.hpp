#pragma once

#include "nlqm/hilbert.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace nlqm {

/// Periodic grid x_k = x_min + k dx, k = 0..n-1, dx = (x_max - x_min) / n.
class Grid1D {
 public:
  /// n_points must be a power of two >= 8 and x_max > x_min.
  Grid1D(double x_min, double x_max, std::size_t n_points);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return n_; }
  double length() const noexcept { return x_max_ - x_min_; }
  double dx() const noexcept { return length() / static_cast<double>(n_); }
  double x(std::size_t k) const noexcept { return x_min_ + static_cast<double>(k) * dx(); }
  /// Angular wavenumbers in FFT order: 0, 1, ..., n/2-1, -n/2, ..., -1 (times 2 pi / L).
  std::vector<double> wavenumbers() const;

  bool operator==(const Grid1D&) const = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
};

/// Samples psi(x_k) on a grid.
class WaveFunction1D {
 public:
  WaveFunction1D(Grid1D grid, std::vector<cplx> values);

  const Grid1D& grid() const noexcept { return grid_; }
  const std::vector<cplx>& values() const noexcept { return values_; }
  std::vector<cplx>& mutable_values() noexcept { return values_; }

  /// integral |psi|^2 dx
  double norm_squared() const;

 private:
  Grid1D grid_;
  std::vector<cplx> values_;
};

/// integral phi^* psi dx by the rectangle rule (spectrally accurate on the periodic grid).
cplx overlap(const WaveFunction1D& phi, const WaveFunction1D& psi);

struct SplitStepConfig {
  double dt = 1e-3;
  /// Snapshot every n steps (0 disables snapshots; the final state is always kept).
  std::size_t record_every = 0;
  /// Optional sampled trap potential V(x_k), applied in two potential half-steps.
  std::optional<std::vector<double>> potential;
};

struct SpatialTrajectory {
  std::vector<double> times;  // every step, including t_start
  std::vector<cplx> gamma;
  std::vector<double> N;
  std::vector<double> tau;
  std::vector<double> snapshot_times;
  std::vector<WaveFunction1D> psi_snapshots;
  std::vector<WaveFunction1D> phi_snapshots;
  std::optional<WaveFunction1D> psi_final;
  std::optional<WaveFunction1D> phi_final;
  double dt = 0.0;  // step actually used
};

/// Strang splitting for
///   i psi_t = -psi_xx / 2 + V psi + g (int phi^* psi dx) phi
///   i phi_t = -phi_xx / 2 + V phi + g* (int psi^* phi dx) psi
/// Each step: kinetic half-step (spectral), potential half-step, coupling step, potential
/// half-step, kinetic half-step. The coupling step treats gamma = <phi|psi> as frozen at its
/// predicted midpoint value and advances the resulting linear 2-channel system with RK4.
/// The number of steps is ceil((t_end - t_start) / dt); dt is shrunk to fit exactly.
/// Throws IntegrationFailure on non-finite values.
SpatialTrajectory evolve_pair_splitstep(const WaveFunction1D& psi0, const WaveFunction1D& phi0,
                                        Coupling g, double t_start, double t_end,
                                        const SplitStepConfig& config);

// Fixtures -------------------------------------------------------------------

/// Normalised Gaussian packet exp(-(x-x0)^2 / (4 sigma^2) + i k0 x), so that |psi|^2 has
/// standard deviation sigma.
WaveFunction1D gaussian_packet(const Grid1D& grid, double x0, double sigma, double k0 = 0.0);

/// Normalised Hermite-Gauss mode of the given order (0..2) centred at 0 with unit width.
WaveFunction1D hermite_gauss(const Grid1D& grid, int order);

/// Standard deviation of |psi|^2 / integral |psi|^2.
double position_spread(const WaveFunction1D& psi);

/// sum_m c_m e^{i k_m x} / sqrt(L) with k_m = 2 pi m / L (grid-orthonormal plane waves).
WaveFunction1D plane_wave_superposition(const Grid1D& grid, const std::vector<int>& modes,
                                        const CVector& coefficients);

/// Closed-form pair on the grid for the free Hamiltonian, with |A>, |B> given as plane-wave
/// coefficient vectors over `modes` (orthonormal). Uses the analytic-solution construction
/// with E_m = k_m^2 / 2.
struct PlaneWaveSolution {
  std::vector<int> modes;
  CVector A;
  CVector B;
  double omega0 = 1.0;
  double vartheta = 0.0;
  double theta = 0.0;
  Coupling g{};
  double t0 = 0.0;
};

std::pair<WaveFunction1D, WaveFunction1D> plane_wave_pair(const Grid1D& grid,
                                                          const PlaneWaveSolution& sol, double t);

}  // namespace nlqm
