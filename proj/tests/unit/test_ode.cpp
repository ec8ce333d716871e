#include "nlqm/error.hpp"
#include "nlqm/ode.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace nlqm {
namespace {

// y' = -y, y' = y... on a 2-vector: (y0' = y1, y1' = -y0) has the exact rotation solution.
const OdeRhs kRotation = [](double, std::span<const double> y, std::span<double> dy) {
  dy[0] = y[1];
  dy[1] = -y[0];
};

TEST(UniformTimes, EndpointsExact) {
  const auto t = uniform_times(-2.0, 2.0, 81);
  ASSERT_EQ(t.size(), 81u);
  EXPECT_EQ(t.front(), -2.0);
  EXPECT_EQ(t.back(), 2.0);
  EXPECT_NEAR(t[1] - t[0], 0.05, 1e-15);
  EXPECT_THROW(uniform_times(0.0, 1.0, 1), ContractViolation);
  EXPECT_THROW(uniform_times(1.0, 1.0, 3), ContractViolation);
}

TEST(SolveOde, AdaptiveMatchesRotation) {
  const std::vector<double> y0{1.0, 0.0};
  const auto times = uniform_times(0.0, 10.0, 21);
  const OdeSolution sol = solve_ode(kRotation, y0, times, {});
  for (std::size_t i = 0; i < times.size(); ++i) {
    EXPECT_NEAR(sol.states[i][0], std::cos(times[i]), 1e-9);
    EXPECT_NEAR(sol.states[i][1], -std::sin(times[i]), 1e-9);
  }
  EXPECT_GT(sol.stats.accepted_steps, 0u);
  EXPECT_EQ(sol.states.front(), y0);
}

TEST(SolveOde, IntegratesBackwardForDecreasingTimes) {
  const std::vector<double> y0{1.0, 0.0};
  const auto times = uniform_times(0.0, -3.0, 7);
  const OdeSolution sol = solve_ode(kRotation, y0, times, {});
  EXPECT_NEAR(sol.states.back()[0], std::cos(-3.0), 1e-9);
  EXPECT_NEAR(sol.states.back()[1], -std::sin(-3.0), 1e-9);
}

TEST(SolveOde, Rk4FourthOrder) {
  const std::vector<double> y0{1.0, 0.0};
  const std::vector<double> times{0.0, 5.0};
  auto error = [&](double h) {
    IntegratorConfig cfg;
    cfg.method = Method::rk4_fixed;
    cfg.initial_step = h;
    return std::abs(solve_ode(kRotation, y0, times, cfg).states.back()[0] - std::cos(5.0));
  };
  const double ratio = error(0.02) / error(0.01);
  EXPECT_GT(ratio, 14.0);
  EXPECT_LT(ratio, 18.0);
}

TEST(SolveOde, Rk4HitsSampleTimesExactly) {
  IntegratorConfig cfg;
  cfg.method = Method::rk4_fixed;
  cfg.initial_step = 0.3;  // does not divide the sample spacing
  const OdeRhs constant = [](double, std::span<const double>, std::span<double> dy) { dy[0] = 1.0; };
  const std::vector<double> y0{0.0};
  const std::vector<double> times{0.0, 0.5, 1.0};
  const OdeSolution sol = solve_ode(constant, y0, times, cfg);
  EXPECT_NEAR(sol.states[1][0], 0.5, 1e-14);
  EXPECT_NEAR(sol.states[2][0], 1.0, 1e-14);
}

TEST(SolveOde, RejectsNonMonotoneTimes) {
  const std::vector<double> y0{1.0, 0.0};
  const std::vector<double> times{0.0, 1.0, 0.5};
  EXPECT_THROW(solve_ode(kRotation, y0, times, {}), ContractViolation);
}

TEST(SolveOde, BlowUpReportsLastGoodTime) {
  // y' = y^2, y(0) = 1 blows up at t = 1.
  const OdeRhs blowup = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[0] * y[0];
  };
  const std::vector<double> y0{1.0};
  const std::vector<double> times{0.0, 2.0};
  try {
    solve_ode(blowup, y0, times, {});
    FAIL() << "expected IntegrationFailure";
  } catch (const IntegrationFailure& e) {
    EXPECT_GT(e.last_good_time(), 0.9);
    EXPECT_LE(e.last_good_time(), 1.0);
  }
}

TEST(SolveOde, StepBudgetExhaustion) {
  IntegratorConfig cfg;
  cfg.max_steps = 3;
  const std::vector<double> y0{1.0, 0.0};
  const std::vector<double> times{0.0, 100.0};
  EXPECT_THROW(solve_ode(kRotation, y0, times, cfg), IntegrationFailure);
}

TEST(IntegratorConfig, Validation) {
  IntegratorConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.abs_tol = 0.0;
  EXPECT_THROW(cfg.validate(), ContractViolation);
  EXPECT_EQ(method_from_string("rk4_fixed"), Method::rk4_fixed);
  EXPECT_EQ(to_string(Method::rk45_adaptive), "rk45_adaptive");
  EXPECT_THROW(method_from_string("euler"), ContractViolation);
}

}  // namespace
}  // namespace nlqm
