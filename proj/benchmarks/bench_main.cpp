#include "nlqm/analytic.hpp"
#include "nlqm/integrator.hpp"
#include "nlqm/spatial.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

namespace {

using namespace nlqm;

AnalyticSolution reference_solution(Eigen::Index dim) {
  const HermitianOperator H = random_hermitian(dim, 42);
  auto [A, B] = random_orthonormal_pair(dim, 7);
  return validate_spec({A, B, 1.0, 0.3, 0.7, {1.0, 0.5}, H, 0.0});
}

void BM_StatePairAt(benchmark::State& state) {
  const AnalyticSolution sol = reference_solution(state.range(0));
  double t = -2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(state_pair_at(sol, t));
    t += 1e-3;
  }
}
BENCHMARK(BM_StatePairAt)->Arg(4)->Arg(32);

void BM_NonlinearIntegrate(benchmark::State& state) {
  const AnalyticSolution sol = reference_solution(state.range(0));
  const StatePair s0 = state_pair_at(sol, -2.0);
  const auto times = uniform_times(-2.0, 2.0, 81);
  IntegratorConfig cfg;
  cfg.abs_tol = 1e-10;
  cfg.rel_tol = 1e-10;
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate(s0.psi, s0.phi, sol.spec().H, {1.0, 0.5}, times, cfg));
}
BENCHMARK(BM_NonlinearIntegrate)->Arg(4)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SplitStep(benchmark::State& state) {
  const Grid1D grid(-std::numbers::pi, std::numbers::pi, static_cast<std::size_t>(state.range(0)));
  CVector A(2), B(2);
  const double s = 1.0 / std::numbers::sqrt2;
  A << s, s;
  B << s, -s;
  const PlaneWaveSolution sol{{1, 3}, A, B, 1.0, 0.3, 0.0, {1.0, 0.5}, 0.0};
  const auto [psi0, phi0] = plane_wave_pair(grid, sol, 0.0);
  SplitStepConfig cfg;
  cfg.dt = 1e-3;
  for (auto _ : state)
    benchmark::DoNotOptimize(evolve_pair_splitstep(psi0, phi0, sol.g, 0.0, 0.1, cfg));
}
BENCHMARK(BM_SplitStep)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
