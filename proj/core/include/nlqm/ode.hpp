#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace nlqm {

enum class Method { rk4_fixed, rk45_adaptive };

std::string_view to_string(Method m) noexcept;
Method method_from_string(std::string_view name);

/// Time-stepping controls shared by every integrator in the library.
///
/// `rk45_adaptive` is the Dormand-Prince 5(4) pair with PI step control (safety 0.9)
/// and 4th-order dense output at the requested sample times. `rk4_fixed` is classical
/// RK4 with step `initial_step`, shrunk per sample interval so that samples are hit exactly.
struct IntegratorConfig {
  Method method = Method::rk45_adaptive;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double max_step = 0.25;
  double initial_step = 1e-3;
  std::size_t max_steps = 20'000'000;

  void validate() const;
};

struct OdeStats {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t rhs_evaluations = 0;
};

/// dy/dt = f(t, y) on a flat real state.
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct OdeSolution {
  std::vector<std::vector<double>> states;  // one per sample time
  OdeStats stats;
};

/// Integrates from sample_times.front() (where y = y0) through every later sample.
/// Sample times must be strictly monotone; decreasing times integrate backwards.
/// Throws IntegrationFailure on step-size underflow, step budget exhaustion or
/// non-finite state values.
OdeSolution solve_ode(const OdeRhs& rhs, std::span<const double> y0,
                      std::span<const double> sample_times, const IntegratorConfig& config);

/// n uniformly spaced times from t_start to t_end inclusive (n >= 2).
std::vector<double> uniform_times(double t_start, double t_end, std::size_t n);

}  // namespace nlqm
