#include "nlqm/ode.hpp"

#include "nlqm/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nlqm {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense output (Hairer & Wanner, contd5).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;  // PI controller memory
constexpr double kExpo = 0.2 - 0.75 * kBeta;
constexpr double kMinFactor = 0.2;  // hnew/h lower bound
constexpr double kMaxFactor = 10.0;

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

class Workspace {
 public:
  Workspace(const OdeRhs& rhs, std::size_t n, OdeStats& stats)
      : rhs_(rhs), stats_(stats), tmp(n), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n) {}

  void eval(double t, std::span<const double> y, std::vector<double>& out) {
    rhs_(t, y, out);
    ++stats_.rhs_evaluations;
  }

 private:
  const OdeRhs& rhs_;
  OdeStats& stats_;

 public:
  std::vector<double> tmp, k1, k2, k3, k4, k5, k6, k7;
};

void check_samples(std::span<const double> times) {
  if (times.empty()) throw ContractViolation("solve_ode: no sample times");
  for (double t : times)
    if (!std::isfinite(t)) throw ContractViolation("solve_ode: non-finite sample time");
  if (times.size() < 2) return;
  const double dir = times[1] > times[0] ? 1.0 : -1.0;
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(dir * (times[i] - times[i - 1]) > 0.0))
      throw ContractViolation("solve_ode: sample times must be strictly monotone");
}

OdeSolution solve_rk4(const OdeRhs& rhs, std::span<const double> y0,
                      std::span<const double> times, const IntegratorConfig& cfg) {
  OdeSolution sol;
  const std::size_t n = y0.size();
  Workspace w(rhs, n, sol.stats);
  std::vector<double> y(y0.begin(), y0.end());
  sol.states.reserve(times.size());
  sol.states.push_back(y);

  double t = times.front();
  for (std::size_t s = 1; s < times.size(); ++s) {
    const double span = times[s] - times[s - 1];
    const auto steps =
        static_cast<std::size_t>(std::max(1.0, std::ceil(std::abs(span) / cfg.initial_step - 1e-9)));
    const double h = span / static_cast<double>(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      w.eval(t, y, w.k1);
      for (std::size_t i = 0; i < n; ++i) w.tmp[i] = y[i] + 0.5 * h * w.k1[i];
      w.eval(t + 0.5 * h, w.tmp, w.k2);
      for (std::size_t i = 0; i < n; ++i) w.tmp[i] = y[i] + 0.5 * h * w.k2[i];
      w.eval(t + 0.5 * h, w.tmp, w.k3);
      for (std::size_t i = 0; i < n; ++i) w.tmp[i] = y[i] + h * w.k3[i];
      w.eval(t + h, w.tmp, w.k4);
      for (std::size_t i = 0; i < n; ++i)
        w.tmp[i] = y[i] + h / 6.0 * (w.k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
      if (!all_finite(w.tmp)) throw IntegrationFailure("rk4: non-finite state", t);
      y.swap(w.tmp);
      t = times[s - 1] + static_cast<double>(k + 1) * h;
      ++sol.stats.accepted_steps;
      if (sol.stats.accepted_steps > cfg.max_steps)
        throw IntegrationFailure("rk4: step budget exhausted", t);
    }
    t = times[s];
    sol.states.push_back(y);
  }
  return sol;
}

OdeSolution solve_dopri5(const OdeRhs& rhs, std::span<const double> y0,
                         std::span<const double> times, const IntegratorConfig& cfg) {
  OdeSolution sol;
  const std::size_t n = y0.size();
  Workspace w(rhs, n, sol.stats);
  std::vector<double> y(y0.begin(), y0.end());
  std::vector<double> y1(n), err(n);
  std::vector<double> r1(n), r2(n), r3(n), r4(n), r5(n);
  sol.states.reserve(times.size());
  sol.states.push_back(y);
  if (times.size() < 2) return sol;

  const double t_end = times.back();
  const double dir = t_end > times.front() ? 1.0 : -1.0;
  double t = times.front();
  double h = dir * std::min(cfg.initial_step, cfg.max_step);
  double err_old = 1e-4;
  bool last_rejected = false;
  std::size_t next_sample = 1;

  w.eval(t, y, w.k1);
  while (next_sample < times.size()) {
    if (sol.stats.accepted_steps + sol.stats.rejected_steps > cfg.max_steps)
      throw IntegrationFailure("dopri5: step budget exhausted", t);
    const double min_step = 1e-14 * std::max(1.0, std::abs(t));
    if (std::abs(h) < min_step) throw IntegrationFailure("dopri5: step size underflow", t);
    if (dir * (t + h - t_end) > 0.0) h = t_end - t;

    for (std::size_t i = 0; i < n; ++i) w.tmp[i] = y[i] + h * a21 * w.k1[i];
    w.eval(t + c2 * h, w.tmp, w.k2);
    for (std::size_t i = 0; i < n; ++i) w.tmp[i] = y[i] + h * (a31 * w.k1[i] + a32 * w.k2[i]);
    w.eval(t + c3 * h, w.tmp, w.k3);
    for (std::size_t i = 0; i < n; ++i)
      w.tmp[i] = y[i] + h * (a41 * w.k1[i] + a42 * w.k2[i] + a43 * w.k3[i]);
    w.eval(t + c4 * h, w.tmp, w.k4);
    for (std::size_t i = 0; i < n; ++i)
      w.tmp[i] = y[i] + h * (a51 * w.k1[i] + a52 * w.k2[i] + a53 * w.k3[i] + a54 * w.k4[i]);
    w.eval(t + c5 * h, w.tmp, w.k5);
    for (std::size_t i = 0; i < n; ++i)
      w.tmp[i] = y[i] + h * (a61 * w.k1[i] + a62 * w.k2[i] + a63 * w.k3[i] + a64 * w.k4[i] +
                             a65 * w.k5[i]);
    w.eval(t + h, w.tmp, w.k6);
    for (std::size_t i = 0; i < n; ++i)
      y1[i] = y[i] + h * (a71 * w.k1[i] + a73 * w.k3[i] + a74 * w.k4[i] + a75 * w.k5[i] +
                          a76 * w.k6[i]);
    w.eval(t + h, y1, w.k7);

    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      err[i] = h * (e1 * w.k1[i] + e3 * w.k3[i] + e4 * w.k4[i] + e5 * w.k5[i] + e6 * w.k6[i] +
                    e7 * w.k7[i]);
      const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
      const double r = err[i] / scale;
      sq += r * r;
    }
    const double err_norm = std::sqrt(sq / static_cast<double>(std::max<std::size_t>(n, 1)));
    if (!std::isfinite(err_norm) || !all_finite(y1)) {
      // Treat as a hard rejection; shrink aggressively.
      ++sol.stats.rejected_steps;
      last_rejected = true;
      h *= kMinFactor;
      continue;
    }

    const double fac11 = std::pow(std::max(err_norm, 1e-300), kExpo);
    if (err_norm <= 1.0) {
      double fac = fac11 / std::pow(err_old, kBeta);
      fac = std::clamp(fac / kSafety, 1.0 / kMaxFactor, 1.0 / kMinFactor);
      double h_new = h / fac;
      err_old = std::max(err_norm, 1e-4);

      // Dense output coefficients for samples inside (t, t + h].
      const double t_new = t + h;
      while (next_sample < times.size() && dir * (times[next_sample] - t_new) <= 0.0) {
        const double theta = (times[next_sample] - t) / h;
        const double theta1 = 1.0 - theta;
        std::vector<double> ys(n);
        if (times[next_sample] == t_new) {
          ys = y1;
        } else {
          for (std::size_t i = 0; i < n; ++i) {
            r1[i] = y[i];
            r2[i] = y1[i] - y[i];
            r3[i] = h * w.k1[i] - r2[i];
            r4[i] = r2[i] - h * w.k7[i] - r3[i];
            r5[i] = h * (d1 * w.k1[i] + d3 * w.k3[i] + d4 * w.k4[i] + d5 * w.k5[i] +
                         d6 * w.k6[i] + d7 * w.k7[i]);
            ys[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
          }
        }
        sol.states.push_back(std::move(ys));
        ++next_sample;
      }

      y.swap(y1);
      w.k1.swap(w.k7);  // first-same-as-last
      t = t_new;
      ++sol.stats.accepted_steps;

      if (std::abs(h_new) > cfg.max_step) h_new = dir * cfg.max_step;
      if (last_rejected) h_new = dir * std::min(std::abs(h_new), std::abs(h));
      last_rejected = false;
      h = h_new;
    } else {
      h /= std::min(1.0 / kMinFactor, fac11 / kSafety);
      ++sol.stats.rejected_steps;
      last_rejected = true;
    }
  }
  return sol;
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::rk4_fixed:
      return "rk4_fixed";
    case Method::rk45_adaptive:
      return "rk45_adaptive";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  if (name == "rk4_fixed") return Method::rk4_fixed;
  if (name == "rk45_adaptive") return Method::rk45_adaptive;
  throw ContractViolation("unknown integrator method '" + std::string(name) + "'");
}

void IntegratorConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
    throw ContractViolation("IntegratorConfig: tolerances must be > 0");
  if (!(max_step > 0.0)) throw ContractViolation("IntegratorConfig: max_step must be > 0");
  if (!(initial_step > 0.0)) throw ContractViolation("IntegratorConfig: initial_step must be > 0");
  if (max_steps == 0) throw ContractViolation("IntegratorConfig: max_steps must be > 0");
}

OdeSolution solve_ode(const OdeRhs& rhs, std::span<const double> y0,
                      std::span<const double> sample_times, const IntegratorConfig& config) {
  config.validate();
  check_samples(sample_times);
  if (!all_finite(y0)) throw IntegrationFailure("non-finite initial state", sample_times.front());
  if (config.method == Method::rk4_fixed) return solve_rk4(rhs, y0, sample_times, config);
  return solve_dopri5(rhs, y0, sample_times, config);
}

std::vector<double> uniform_times(double t_start, double t_end, std::size_t n) {
  if (n < 2) throw ContractViolation("uniform_times: need at least 2 samples");
  if (!(t_end != t_start)) throw ContractViolation("uniform_times: empty interval");
  std::vector<double> t(n);
  const double dt = (t_end - t_start) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) t[i] = t_start + static_cast<double>(i) * dt;
  t.back() = t_end;
  return t;
}

}  // namespace nlqm
