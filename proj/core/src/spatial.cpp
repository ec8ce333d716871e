#include "nlqm/spatial.hpp"

#include "nlqm/analytic.hpp"
#include "nlqm/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace nlqm {

namespace {

constexpr cplx kI{0.0, 1.0};

// FFTW's planner is not re-entrant; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// Owns an aligned buffer and forward/backward plans for one transform length.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(std::size_t n) : n_(n) {
    buffer_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (buffer_ == nullptr) throw std::bad_alloc();
    std::lock_guard lock(planner_mutex());
    const int len = static_cast<int>(n);
    forward_ = fftw_plan_dft_1d(len, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(len, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  ~SpectralWorkspace() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(buffer_);
  }

  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  /// values <- IFFT(phase .* FFT(values))
  void apply_diagonal_in_k(std::vector<cplx>& values, const std::vector<cplx>& phase) {
    auto* buf = reinterpret_cast<cplx*>(buffer_);
    std::copy(values.begin(), values.end(), buf);
    fftw_execute(forward_);
    const double inv_n = 1.0 / static_cast<double>(n_);
    for (std::size_t k = 0; k < n_; ++k) buf[k] *= phase[k] * inv_n;
    fftw_execute(backward_);
    std::copy(buf, buf + n_, values.begin());
  }

 private:
  std::size_t n_;
  fftw_complex* buffer_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double sum_norm(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return s;
}

cplx sum_dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s{0.0, 0.0};
  for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
  return s;
}

// Classical RK4 propagator for y' = -i [[0, g gamma], [g* gamma*, 0]] y over h with gamma
// frozen; for a constant matrix this is the degree-4 Taylor polynomial of exp(h M).
Eigen::Matrix2cd rk4_channel_propagator(Coupling g, cplx gamma, double h) {
  Eigen::Matrix2cd M;
  M << 0.0, -kI * g.value() * gamma, -kI * g.conj() * std::conj(gamma), 0.0;
  const Eigen::Matrix2cd hM = h * M;
  const Eigen::Matrix2cd hM2 = hM * hM;
  return Eigen::Matrix2cd::Identity() + hM + hM2 / 2.0 + hM2 * hM / 6.0 + hM2 * hM2 / 24.0;
}

}  // namespace

Grid1D::Grid1D(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min))
    throw ContractViolation("Grid1D: need finite x_max > x_min");
  if (n_points < 8 || !is_power_of_two(n_points))
    throw ContractViolation("Grid1D: n_points must be a power of two >= 8");
}

std::vector<double> Grid1D::wavenumbers() const {
  std::vector<double> k(n_);
  const double dk = 2.0 * std::numbers::pi / length();
  const auto half = static_cast<long>(n_ / 2);
  for (std::size_t j = 0; j < n_; ++j) {
    const auto m = static_cast<long>(j);
    k[j] = dk * static_cast<double>(m < half ? m : m - static_cast<long>(n_));
  }
  return k;
}

WaveFunction1D::WaveFunction1D(Grid1D grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw ContractViolation("WaveFunction1D: sample count does not match grid");
  for (const auto& z : values_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw ContractViolation("WaveFunction1D: non-finite sample");
}

double WaveFunction1D::norm_squared() const { return grid_.dx() * sum_norm(values_); }

cplx overlap(const WaveFunction1D& phi, const WaveFunction1D& psi) {
  if (!(phi.grid() == psi.grid())) throw ContractViolation("overlap: grid mismatch");
  return phi.grid().dx() * sum_dot(phi.values(), psi.values());
}

SpatialTrajectory evolve_pair_splitstep(const WaveFunction1D& psi0, const WaveFunction1D& phi0,
                                        Coupling g, double t_start, double t_end,
                                        const SplitStepConfig& config) {
  if (!(psi0.grid() == phi0.grid())) throw ContractViolation("evolve_pair_splitstep: grid mismatch");
  if (!(config.dt > 0.0)) throw ContractViolation("evolve_pair_splitstep: dt must be > 0");
  if (!(t_end > t_start)) throw ContractViolation("evolve_pair_splitstep: need t_end > t_start");
  const Grid1D& grid = psi0.grid();
  const std::size_t n = grid.size();
  if (config.potential && config.potential->size() != n)
    throw ContractViolation("evolve_pair_splitstep: potential length does not match grid");

  const auto steps =
      static_cast<std::size_t>(std::ceil((t_end - t_start) / config.dt - 1e-9));
  const double dt = (t_end - t_start) / static_cast<double>(steps);
  const double dx = grid.dx();

  std::vector<cplx> kinetic_half(n);
  {
    const auto k = grid.wavenumbers();
    for (std::size_t j = 0; j < n; ++j) kinetic_half[j] = std::polar(1.0, -0.25 * k[j] * k[j] * dt);
  }
  std::vector<cplx> potential_half;
  if (config.potential) {
    potential_half.resize(n);
    for (std::size_t j = 0; j < n; ++j)
      potential_half[j] = std::polar(1.0, -0.5 * (*config.potential)[j] * dt);
  }

  SpectralWorkspace fft(n);
  std::vector<cplx> psi = psi0.values();
  std::vector<cplx> phi = phi0.values();

  SpatialTrajectory out;
  out.dt = dt;
  out.times.reserve(steps + 1);
  auto record = [&](double t, std::size_t step) {
    const double pp = dx * sum_norm(psi);
    const double ff = dx * sum_norm(phi);
    out.times.push_back(t);
    out.N.push_back(pp + ff);
    out.tau.push_back(pp - ff);
    out.gamma.push_back(dx * sum_dot(phi, psi));
    if (config.record_every > 0 && step % config.record_every == 0) {
      out.snapshot_times.push_back(t);
      out.psi_snapshots.emplace_back(grid, psi);
      out.phi_snapshots.emplace_back(grid, phi);
    }
  };
  record(t_start, 0);

  auto apply_potential = [&] {
    if (potential_half.empty()) return;
    for (std::size_t j = 0; j < n; ++j) {
      psi[j] *= potential_half[j];
      phi[j] *= potential_half[j];
    }
  };

  for (std::size_t s = 1; s <= steps; ++s) {
    const double t_prev = t_start + static_cast<double>(s - 1) * dt;

    fft.apply_diagonal_in_k(psi, kinetic_half);
    fft.apply_diagonal_in_k(phi, kinetic_half);
    apply_potential();

    // Coupling step. The kinetic and potential flows leave <phi|psi>, <psi|psi>, <phi|phi>
    // unchanged, so the midpoint gamma can be predicted from these three numbers alone.
    const double pp = dx * sum_norm(psi);
    const double ff = dx * sum_norm(phi);
    const cplx gamma0 = dx * sum_dot(phi, psi);
    const Eigen::Matrix2cd P_half = rk4_channel_propagator(g, gamma0, 0.5 * dt);
    const cplx gamma_mid = std::conj(P_half(1, 0)) * P_half(0, 0) * pp +
                           std::conj(P_half(1, 0)) * P_half(0, 1) * std::conj(gamma0) +
                           std::conj(P_half(1, 1)) * P_half(0, 0) * gamma0 +
                           std::conj(P_half(1, 1)) * P_half(0, 1) * ff;
    const Eigen::Matrix2cd P = rk4_channel_propagator(g, gamma_mid, dt);
    for (std::size_t j = 0; j < n; ++j) {
      const cplx p = psi[j];
      const cplx f = phi[j];
      psi[j] = P(0, 0) * p + P(0, 1) * f;
      phi[j] = P(1, 0) * p + P(1, 1) * f;
    }

    apply_potential();
    fft.apply_diagonal_in_k(psi, kinetic_half);
    fft.apply_diagonal_in_k(phi, kinetic_half);

    const double t_now = s == steps ? t_end : t_prev + dt;
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(psi[j].real()) || !std::isfinite(psi[j].imag()) ||
          !std::isfinite(phi[j].real()) || !std::isfinite(phi[j].imag()))
        throw IntegrationFailure("evolve_pair_splitstep: non-finite values", t_prev);
    }
    record(t_now, s);
  }

  out.psi_final.emplace(grid, psi);
  out.phi_final.emplace(grid, phi);
  return out;
}

WaveFunction1D gaussian_packet(const Grid1D& grid, double x0, double sigma, double k0) {
  if (!(sigma > 0.0)) throw ContractViolation("gaussian_packet: sigma must be > 0");
  const double norm = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
  std::vector<cplx> v(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double d = grid.x(j) - x0;
    v[j] = norm * std::exp(-d * d / (4.0 * sigma * sigma)) * std::polar(1.0, k0 * grid.x(j));
  }
  return {grid, std::move(v)};
}

WaveFunction1D hermite_gauss(const Grid1D& grid, int order) {
  const double c = std::pow(std::numbers::pi, -0.25);
  std::vector<cplx> v(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.x(j);
    const double g = c * std::exp(-0.5 * x * x);
    switch (order) {
      case 0:
        v[j] = g;
        break;
      case 1:
        v[j] = std::numbers::sqrt2 * x * g;
        break;
      case 2:
        v[j] = (2.0 * x * x - 1.0) / std::numbers::sqrt2 * g;
        break;
      default:
        throw ContractViolation("hermite_gauss: order must be 0, 1 or 2");
    }
  }
  return {grid, std::move(v)};
}

double position_spread(const WaveFunction1D& psi) {
  const auto& g = psi.grid();
  double w = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double p = std::norm(psi.values()[j]);
    const double x = g.x(j);
    w += p;
    m1 += p * x;
    m2 += p * x * x;
  }
  if (!(w > 0.0)) throw DegenerateInput("position_spread: zero wave function");
  m1 /= w;
  m2 /= w;
  return std::sqrt(std::max(m2 - m1 * m1, 0.0));
}

WaveFunction1D plane_wave_superposition(const Grid1D& grid, const std::vector<int>& modes,
                                        const CVector& coefficients) {
  if (coefficients.size() != static_cast<Eigen::Index>(modes.size()))
    throw ContractViolation("plane_wave_superposition: one coefficient per mode required");
  const double dk = 2.0 * std::numbers::pi / grid.length();
  const double amp = 1.0 / std::sqrt(grid.length());
  std::vector<cplx> v(grid.size(), cplx(0.0, 0.0));
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const double k = dk * modes[m];
    const cplx c = coefficients[static_cast<Eigen::Index>(m)];
    // Phase measured from x_min keeps each mode exactly periodic on the grid.
    for (std::size_t j = 0; j < grid.size(); ++j)
      v[j] += c * amp * std::polar(1.0, k * (grid.x(j) - grid.x_min()));
  }
  return {grid, std::move(v)};
}

std::pair<WaveFunction1D, WaveFunction1D> plane_wave_pair(const Grid1D& grid,
                                                          const PlaneWaveSolution& sol, double t) {
  if (sol.modes.empty()) throw ContractViolation("plane_wave_pair: no modes");
  const double dk = 2.0 * std::numbers::pi / grid.length();
  std::vector<double> energies;
  energies.reserve(sol.modes.size());
  for (int m : sol.modes) energies.push_back(0.5 * (dk * m) * (dk * m));
  HermitianOperator H = HermitianOperator::diagonal(energies);

  AnalyticSolutionSpec spec{H.to_eigenbasis(sol.A), H.to_eigenbasis(sol.B), sol.omega0,
                            sol.vartheta, sol.theta, sol.g, H, sol.t0};
  const AnalyticSolution analytic = validate_spec(std::move(spec));
  const StatePair pair = state_pair_at(analytic, t);
  return {plane_wave_superposition(grid, sol.modes, pair.psi.amplitudes()),
          plane_wave_superposition(grid, sol.modes, pair.phi.amplitudes())};
}

}  // namespace nlqm
