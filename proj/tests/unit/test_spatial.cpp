#include "nlqm/error.hpp"
#include "nlqm/reduced.hpp"
#include "nlqm/spatial.hpp"

#include <gtest/gtest.h>

#include <numbers>

namespace nlqm {
namespace {

const double kPi = std::numbers::pi;

TEST(Grid1D, Geometry) {
  const Grid1D grid(-kPi, kPi, 16);
  EXPECT_DOUBLE_EQ(grid.dx(), 2.0 * kPi / 16.0);
  EXPECT_DOUBLE_EQ(grid.x(0), -kPi);
  const auto k = grid.wavenumbers();
  ASSERT_EQ(k.size(), 16u);
  EXPECT_EQ(k[1], 1.0);
  EXPECT_EQ(k[8], -8.0);
  EXPECT_EQ(k[15], -1.0);
}

TEST(Grid1D, RejectsInvalidGrids) {
  EXPECT_THROW(Grid1D(-1.0, 1.0, 100), ContractViolation);
  EXPECT_THROW(Grid1D(-1.0, 1.0, 4), ContractViolation);
  EXPECT_THROW(Grid1D(1.0, 1.0, 64), ContractViolation);
  EXPECT_THROW(WaveFunction1D(Grid1D(-1.0, 1.0, 8), std::vector<cplx>(7)), ContractViolation);
}

TEST(Overlap, GaussianNormalised) {
  const Grid1D grid(-20.0, 20.0, 256);
  const WaveFunction1D g = gaussian_packet(grid, 0.0, 1.0);
  EXPECT_NEAR(std::abs(overlap(g, g) - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(g.norm_squared(), 1.0, 1e-12);
}

TEST(Overlap, HermiteModesOrthonormal) {
  const Grid1D grid(-20.0, 20.0, 256);
  const WaveFunction1D h0 = hermite_gauss(grid, 0);
  const WaveFunction1D h1 = hermite_gauss(grid, 1);
  const WaveFunction1D h2 = hermite_gauss(grid, 2);
  EXPECT_NEAR(std::abs(overlap(h0, h1)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(overlap(h0, h2)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(overlap(h1, h1) - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(overlap(h2, h2) - 1.0), 0.0, 1e-12);
  EXPECT_THROW(hermite_gauss(grid, 3), ContractViolation);
}

TEST(Overlap, ConvergedUnderRefinement) {
  const Grid1D coarse(-20.0, 20.0, 256);
  const Grid1D fine(-20.0, 20.0, 512);
  auto value = [](const Grid1D& g) {
    return overlap(gaussian_packet(g, 0.3, 1.2, 0.5), hermite_gauss(g, 1));
  };
  EXPECT_LT(std::abs(value(coarse) - value(fine)), 1e-10);
}

TEST(Overlap, RejectsGridMismatch) {
  EXPECT_THROW(overlap(hermite_gauss(Grid1D(-20.0, 20.0, 256), 0), hermite_gauss(Grid1D(-20.0, 20.0, 128), 0)),
               ContractViolation);
}

TEST(PlaneWaves, GridOrthonormal) {
  const Grid1D grid(-kPi, kPi, 64);
  CVector c1(1), c2(1);
  c1 << 1.0;
  c2 << 1.0;
  const WaveFunction1D w1 = plane_wave_superposition(grid, {1}, c1);
  const WaveFunction1D w3 = plane_wave_superposition(grid, {3}, c2);
  EXPECT_NEAR(std::abs(overlap(w1, w1) - 1.0), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(overlap(w1, w3)), 0.0, 1e-13);
}

TEST(SplitStep, GaussianWidthLaw) {
  const Grid1D grid(-40.0, 40.0, 1024);
  const WaveFunction1D psi0 = gaussian_packet(grid, 0.0, 1.0);
  const WaveFunction1D phi0 = gaussian_packet(grid, 0.0, 1.0, 1.0);
  SplitStepConfig cfg;
  cfg.dt = 0.01;
  const SpatialTrajectory tr = evolve_pair_splitstep(psi0, phi0, {0.0, 0.0}, 0.0, 2.0, cfg);
  // sigma(t) = sigma0 sqrt(1 + (t / (2 sigma0^2))^2)
  EXPECT_NEAR(position_spread(*tr.psi_final), std::sqrt(2.0), 1e-8);
  EXPECT_NEAR(position_spread(*tr.phi_final), std::sqrt(2.0), 1e-8);
}

TEST(SplitStep, OrthogonalPacketsStayUncoupled) {
  const Grid1D grid(-20.0, 20.0, 256);
  SplitStepConfig cfg;
  cfg.dt = 1e-3;
  const SpatialTrajectory tr =
      evolve_pair_splitstep(hermite_gauss(grid, 0), hermite_gauss(grid, 1), {1.0, 0.5}, 0.0, 1.0, cfg);
  for (cplx g : tr.gamma) EXPECT_LT(std::abs(g), 1e-8);
}

struct PlaneWaveRun {
  SpatialTrajectory tr;
  PlaneWaveSolution sol;
};

PlaneWaveRun plane_wave_run(double dt, double t_end = 2.0) {
  const Grid1D grid(-kPi, kPi, 256);
  CVector A(2), B(2);
  const double s = 1.0 / std::numbers::sqrt2;
  A << s, s;
  B << s, -s;
  PlaneWaveRun run;
  run.sol = PlaneWaveSolution{{1, 3}, A, B, 1.0, 0.3, 0.0, {1.0, 0.5}, 0.0};
  const auto [psi0, phi0] = plane_wave_pair(grid, run.sol, 0.0);
  SplitStepConfig cfg;
  cfg.dt = dt;
  run.tr = evolve_pair_splitstep(psi0, phi0, run.sol.g, 0.0, t_end, cfg);
  return run;
}

TEST(SplitStep, PlaneWavePairTracksReducedDynamics) {
  const PlaneWaveRun run = plane_wave_run(1e-3);
  const auto& tr = run.tr;
  const ReducedParams rp{1.0, 0.0, {1.0, 0.5}, 0.0};
  double gdev = 0.0;
  double ndrift = 0.0;
  double omega_dev = 0.0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    gdev = std::max(gdev, std::abs(std::abs(tr.gamma[i]) - 1.0 / std::cosh(tr.times[i])));
    ndrift = std::max(ndrift, std::abs(tr.N[i] - tr.N.front()) / tr.N.front());
    omega_dev = std::max(omega_dev, std::abs(tr.tau[i] * tr.tau[i] / 4.0 + std::norm(tr.gamma[i]) - 1.0));
  }
  EXPECT_LT(gdev, 1e-4);
  EXPECT_LT(ndrift, 1e-6);
  EXPECT_LT(omega_dev, 1e-5);
  EXPECT_NEAR(tr.N.front(), 2.0 * std::cosh(0.6), 1e-12);
  EXPECT_NEAR(std::abs(tr.gamma.back() - gamma_analytic(rp, tr.times.back())), 0.0, 1e-4);
}

TEST(SplitStep, MatchesClosedFormOnGrid) {
  const PlaneWaveRun run = plane_wave_run(1e-3);
  const auto [psi, phi] = plane_wave_pair(run.tr.psi_final->grid(), run.sol, 2.0);
  double sq = 0.0;
  for (std::size_t k = 0; k < psi.values().size(); ++k)
    sq += std::norm(psi.values()[k] - run.tr.psi_final->values()[k]);
  EXPECT_LT(std::sqrt(sq * psi.grid().dx()), 1e-4);
}

TEST(SplitStep, SecondOrderInDt) {
  const auto final_pair = [](double dt) {
    const PlaneWaveRun run = plane_wave_run(dt);
    return std::make_pair(*run.tr.psi_final, *run.tr.phi_final);
  };
  const auto coarse = final_pair(1e-3);
  const auto fine = final_pair(5e-4);
  const auto reference = final_pair(1.25e-4);
  auto distance = [](const auto& a, const auto& b) {
    double sq = 0.0;
    for (std::size_t k = 0; k < a.first.values().size(); ++k)
      sq += std::norm(a.first.values()[k] - b.first.values()[k]) +
            std::norm(a.second.values()[k] - b.second.values()[k]);
    return std::sqrt(sq * a.first.grid().dx());
  };
  const double ratio = distance(coarse, reference) / distance(fine, reference);
  EXPECT_GE(ratio, 3.5);
  EXPECT_LE(ratio, 4.5);
}

TEST(SplitStep, SnapshotsAndStepCount) {
  const Grid1D grid(-20.0, 20.0, 64);
  SplitStepConfig cfg;
  cfg.dt = 0.03;  // shrunk to 1/34 to fit [0, 1]
  cfg.record_every = 17;
  const SpatialTrajectory tr =
      evolve_pair_splitstep(hermite_gauss(grid, 0), hermite_gauss(grid, 1), {1.0, 0.5}, 0.0, 1.0, cfg);
  EXPECT_EQ(tr.times.size(), 35u);
  EXPECT_NEAR(tr.dt, 1.0 / 34.0, 1e-15);
  EXPECT_EQ(tr.times.back(), 1.0);
  EXPECT_EQ(tr.psi_snapshots.size(), 3u);
}

TEST(SplitStep, RejectsInvalidArguments) {
  const Grid1D grid(-20.0, 20.0, 64);
  SplitStepConfig cfg;
  cfg.dt = -1.0;
  EXPECT_THROW(evolve_pair_splitstep(hermite_gauss(grid, 0), hermite_gauss(grid, 1), {1.0, 0.5}, 0.0, 1.0, cfg),
               ContractViolation);
}

}  // namespace
}  // namespace nlqm
