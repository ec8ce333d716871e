#include "nlqm/analytic.hpp"
#include "nlqm/appendix.hpp"
#include "nlqm/cli/runner.hpp"
#include "nlqm/integrator.hpp"
#include "nlqm/reduced.hpp"
#include "nlqm/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace nlqm::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Recorder {
 public:
  Recorder(std::vector<VerifyCheck>& out, std::string suite) : out_(out), suite_(std::move(suite)) {}

  void at_most(const std::string& name, double value, double tol) { within(name, value, 0.0, tol); }

  void within(const std::string& name, double value, double lo, double hi) {
    out_.push_back({suite_, name, value, lo, hi, value >= lo && value <= hi});
  }

  void guarded(const std::string& name, const std::function<void(Recorder&)>& body) {
    try {
      body(*this);
    } catch (const std::exception& e) {
      out_.push_back({suite_, name + " (threw: " + e.what() + ")", kNaN, 0.0, 0.0, false});
    }
  }

 private:
  std::vector<VerifyCheck>& out_;
  std::string suite_;
};

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Reference scenario shared by the analytic and integrator suites.
struct Reference {
  HermitianOperator H = random_hermitian(4, 42);
  Coupling g{1.0, 0.5};
  AnalyticSolution sol = make();
  std::vector<double> times = uniform_times(-2.0, 2.0, 81);

  AnalyticSolution make() const {
    auto [A, B] = random_orthonormal_pair(4, 7);
    return validate_spec({A, B, 1.0, 0.3, 0.7, g, H, 0.0});
  }
};

double max_pair_deviation(const Trajectory& tr, const AnalyticSolution& sol) {
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const StatePair p = state_pair_at(sol, tr.times[i]);
    worst = std::max(worst, (tr.psi_states[i].amplitudes() - p.psi.amplitudes()).norm());
    worst = std::max(worst, (tr.phi_states[i].amplitudes() - p.phi.amplitudes()).norm());
  }
  return worst;
}

void suite_reduced(std::vector<VerifyCheck>& out) {
  Recorder r(out, "reduced");
  const ReducedParams p{1.0, 0.7, {1.0, 0.5}, 0.0};
  const auto times = uniform_times(-2.0, 2.0, 101);

  r.guarded("closed forms", [&](Recorder& r) {
    double omega_res = 0.0, delta_res = 0.0;
    for (double t : times) {
      const auto td = tau_delta_analytic(p, t);
      const cplx gm = gamma_analytic(p, t);
      omega_res = std::max(omega_res, std::abs(0.25 * td.tau * td.tau + td.delta - 1.0));
      delta_res = std::max(delta_res, std::abs(td.delta - std::norm(gm)));
    }
    r.at_most("tau^2/4 + delta = omega0^2 (closed form)", omega_res, 1e-12);
    r.at_most("delta = |gamma|^2 (closed form)", delta_res, 1e-12);
  });

  r.guarded("phase", [&](Recorder& r) {
    const ReducedParams q{1.3, 0.4, {0.0, 0.5}, 0.2};
    double worst = 0.0;
    for (double t : times) worst = std::max(worst, std::abs(std::arg(gamma_analytic(q, t)) - 0.4));
    r.at_most("arg gamma = theta when a = 0", worst, 1e-12);
  });

  r.guarded("integration", [&](Recorder& r) {
    const auto td = tau_delta_analytic(p, times.front());
    const cplx g0 = gamma_analytic(p, times.front());
    const ReducedTrajectory tr =
        integrate_reduced({2.0 * std::cosh(0.6), td.tau, g0, std::norm(g0)}, p.g, times, {});
    double dev = 0.0, drift = 0.0, ndrift = 0.0;
    const double w2 = tr.states.front().omega0_squared();
    for (std::size_t i = 0; i < times.size(); ++i) {
      const auto& s = tr.states[i];
      const auto an = tau_delta_analytic(p, times[i]);
      dev = std::max({dev, std::abs(s.tau - an.tau), std::abs(s.gamma - gamma_analytic(p, times[i]))});
      drift = std::max(drift, std::abs(s.omega0_squared() - w2));
      ndrift = std::max(ndrift, std::abs(s.N - tr.states.front().N));
    }
    r.at_most("integrated vs closed form", dev, 1e-8);
    r.at_most("omega0^2 drift", drift, 1e-8);
    r.at_most("N drift", ndrift, 1e-12);
  });

  r.guarded("branches", [&](Recorder& r) {
    const bool imaginary = classify_branch(-1.0, BranchSelector::tanh).physical;
    const bool coth = classify_branch(1.0, BranchSelector::coth).physical;
    const bool tanh = classify_branch(1.0, BranchSelector::tanh).physical;
    r.at_most("imaginary lambda rejected", imaginary ? 1.0 : 0.0, 0.0);
    r.at_most("coth branch rejected", coth ? 1.0 : 0.0, 0.0);
    r.at_most("tanh branch accepted", tanh ? 0.0 : 1.0, 0.0);
  });
}

void suite_analytic(std::vector<VerifyCheck>& out) {
  Recorder r(out, "analytic");
  const Reference ref;

  r.guarded("observables", [&](Recorder& r) {
    const ReducedParams p = ref.sol.reduced_params();
    double n_dev = 0.0, red_dev = 0.0, pur = 0.0, eig = 0.0, schwarz = 0.0;
    const double sh2 = std::pow(std::sinh(0.3), 2);
    const double ch2 = std::pow(std::cosh(0.3), 2);
    const double S0 = 4.0 * sh2 * ch2;
    for (double t : ref.times) {
      const StatePair sp = state_pair_at(ref.sol, t);
      const ReducedState obs = reduced_observables(sp.psi, sp.phi);
      n_dev = std::max(n_dev, std::abs(obs.N - ref.sol.norm()) / ref.sol.norm());
      const auto td = tau_delta_analytic(p, t);
      red_dev = std::max({red_dev, std::abs(obs.tau - td.tau),
                          std::abs(obs.gamma - gamma_analytic(p, t))});
      const DensityMatrix rho = density_matrix(sp.psi, sp.phi);
      const double S = schwarz_parameter(sp.psi, sp.phi);
      schwarz = std::max(schwarz, std::abs(S - S0));
      pur = std::max(pur, std::abs(purity(rho) - (1.0 - 2.0 * S / (obs.N * obs.N))));
      const auto ev = rho.eigenvalues();
      const double scale = 2.0 / ref.sol.norm();
      eig = std::max({eig, std::abs(ev[0] - 0.0), std::abs(ev[1] - 0.0),
                      std::abs(ev[2] - scale * sh2), std::abs(ev[3] - scale * ch2)});
    }
    r.at_most("N = 2 omega0 cosh(2 vartheta)", n_dev, 1e-10);
    r.at_most("pair observables vs reduced closed forms", red_dev, 1e-10);
    r.at_most("Schwarz parameter constant", schwarz, 1e-10);
    r.at_most("purity = 1 - 2S/N^2", pur, 1e-12);
    r.at_most("rho eigenvalues", eig, 1e-10);
  });

  r.guarded("residual", [&](Recorder& r) {
    const double h = 1e-3;
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const double t = -1.9 + 0.2 * k;
      auto at = [&](double s) { return state_pair_at(ref.sol, s); };
      const StatePair m2 = at(t - 2 * h), m1 = at(t - h), p1 = at(t + h), p2 = at(t + 2 * h);
      const CVector dpsi = (m2.psi.amplitudes() - 8.0 * m1.psi.amplitudes() +
                            8.0 * p1.psi.amplitudes() - p2.psi.amplitudes()) / (12.0 * h);
      const CVector dphi = (m2.phi.amplitudes() - 8.0 * m1.phi.amplitudes() +
                            8.0 * p1.phi.amplitudes() - p2.phi.amplitudes()) / (12.0 * h);
      const StatePair c = at(t);
      const PairDerivative d = nonlinear_rhs(c.psi, c.phi, ref.H, ref.g);
      worst = std::max({worst, (dpsi - d.dpsi).norm(), (dphi - d.dphi).norm()});
    }
    r.at_most("closed form satisfies the nonlinear equations", worst, 1e-6);
  });

  r.guarded("s-matrix", [&](Recorder& r) {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double theta = uniform(rng, -std::numbers::pi, std::numbers::pi);
      const double a = uniform(rng, -2.0, 2.0);
      double b = uniform(rng, -2.0, 2.0);
      if (std::abs(b) < 1e-3) b = 0.5;
      const SMatrix S = s_matrix(theta, {a, b});
      worst = std::max(worst,
                       (S.entries.adjoint() * S.entries - Eigen::Matrix2cd::Identity()).norm());
    }
    r.at_most("S unitary (100 random couplings)", worst, 1e-14);
  });
}

void suite_integrator(std::vector<VerifyCheck>& out) {
  Recorder r(out, "integrator");
  const Reference ref;
  const StatePair start = state_pair_at(ref.sol, ref.times.front());

  r.guarded("adaptive", [&](Recorder& r) {
    const Trajectory tr = integrate(start.psi, start.phi, ref.H, ref.g, ref.times, {});
    r.at_most("numeric vs closed-form pair", max_pair_deviation(tr, ref.sol), 1e-6);
    r.at_most("relative N drift", tr.drift.max_rel_N_drift, 1e-8);
    r.at_most("omega0^2 drift", tr.drift.max_omega0_sq_drift, 1e-8);
    r.at_most("delta - |gamma|^2", tr.drift.max_delta_residual, 1e-8);
    r.at_most("Schwarz drift", tr.drift.max_schwarz_drift, 1e-8);
    r.at_most("purity identity", tr.drift.max_purity_residual, 1e-10);

    const ReducedParams p = ref.sol.reduced_params();
    const Trajectory lin = integrate_linearized(
        start.psi, start.phi, ref.H, ref.g, [p](double t) { return gamma_analytic(p, t); },
        ref.times, {});
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i)
      worst = std::max({worst,
                        (lin.psi_states[i].amplitudes() - tr.psi_states[i].amplitudes()).norm(),
                        (lin.phi_states[i].amplitudes() - tr.phi_states[i].amplitudes()).norm()});
    r.at_most("linearized vs nonlinear", worst, 1e-6);
  });

  r.guarded("exceptional", [&](Recorder& r) {
    const auto& spec = ref.sol.spec();
    const StateVector A(ref.H.from_eigenbasis(spec.A_coeffs));
    const StateVector B(ref.H.from_eigenbasis(spec.B_coeffs));
    const Trajectory tr = integrate(A, B, ref.H, ref.g, ref.times, {});
    double gmax = 0.0;
    for (const auto& o : tr.observables) gmax = std::max(gmax, std::abs(o.gamma));
    r.at_most("orthogonal pair keeps gamma = 0", gmax, 1e-8);
  });

  r.guarded("rk4 order", [&](Recorder& r) {
    auto error_at = [&](double h) {
      IntegratorConfig cfg;
      cfg.method = Method::rk4_fixed;
      cfg.initial_step = h;
      const Trajectory tr = integrate(start.psi, start.phi, ref.H, ref.g, ref.times, cfg);
      return max_pair_deviation(tr, ref.sol);
    };
    r.within("rk4 error ratio under step halving", error_at(0.01) / error_at(0.005), 12.0, 20.0);
  });
}

void suite_appendix(std::vector<VerifyCheck>& out) {
  Recorder r(out, "appendix");
  const double b = -0.5;
  const double t0 = 0.0;

  r.guarded("norm law", [&](Recorder& r) {
    const double h = 1e-4;
    double worst = 0.0;
    for (int k = 0; k <= 20; ++k) {
      const double t = 1.0 + 0.1 * k;
      const double n = single_vector_complex_g_norm(b, t0, t);
      const double dn = (single_vector_complex_g_norm(b, t0, t + h) -
                         single_vector_complex_g_norm(b, t0, t - h)) / (2.0 * h);
      worst = std::max(worst, std::abs(dn - 2.0 * b * n * n));
    }
    r.at_most("norm law satisfies its ODE", worst, 1e-6);

    const HermitianOperator H = random_hermitian(3, 11);
    const auto times = uniform_times(1.0, 3.0, 41);
    const StateVector psi0(random_state(3, 5).amplitudes() *
                           std::sqrt(single_vector_complex_g_norm(b, t0, 1.0)));
    const auto tr = integrate_single_vector(psi0, H, {0.3, b}, times, {});
    double dev = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
      dev = std::max(dev, std::abs(tr.norms[i] - single_vector_complex_g_norm(b, t0, times[i])));
    r.at_most("numeric single vector follows the norm law", dev, 1e-6);

    double thrown = 1.0;
    try {
      (void)single_vector_complex_g_norm(b, t0, -1.0);
    } catch (const ExistenceWindowError&) {
      thrown = 0.0;
    }
    r.at_most("outside the existence window is rejected", thrown, 0.0);
  });

  r.guarded("real g single vector", [&](Recorder& r) {
    const HermitianOperator H = random_hermitian(3, 11);
    const CVector c = random_state(3, 5).amplitudes() * std::sqrt(1.7);
    const SingleVectorSpec spec{c, {0.8, 0.0}, 0.0, H};
    const auto times = uniform_times(0.0, 4.0, 41);
    const auto tr = integrate_single_vector(StateVector(H.from_eigenbasis(c)), H, spec.g, times, {});
    double dev = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
      dev = std::max(dev, (tr.states[i].amplitudes() -
                           single_vector_real_g(spec, times[i]).amplitudes()).norm());
    r.at_most("real-g single vector closed form", dev, 1e-8);
  });

  r.guarded("k forms", [&](Recorder& r) {
    std::mt19937_64 rng(99);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const KForms f = real_g_k_forms(uniform(rng, -2.0, 2.0), uniform(rng, 0.05, 2.0));
      worst = std::max(worst, std::abs(f.from_delta - f.from_tau) / std::abs(f.from_delta));
    }
    r.at_most("both forms of k agree (1000 random)", worst, 1e-12);
  });

  r.guarded("real g pair", [&](Recorder& r) {
    const HermitianOperator H = random_hermitian(4, 42);
    const double tau0 = 0.5, delta0 = 1.0, g = 1.0;
    const double k = real_g_k(tau0, delta0);
    auto [A, B] = random_orthonormal_pair(4, 7);
    const double alpha = 0.5;
    const double beta = std::sqrt((1.0 + alpha * alpha / k) / k);
    const RealGSolution sol = validate_real_g(
        {alpha * A, beta * B, tau0, delta0, std::polar(1.0, 0.3), g, H});
    const double period = 2.0 * std::numbers::pi / (g * sol.omega0());
    const auto times = uniform_times(0.0, period, 65);
    const StatePair s0 = real_g_state_pair(sol, 0.0);
    const Trajectory tr = integrate(s0.psi, s0.phi, H, {g, 0.0}, times, {});
    double tau_drift = 0.0, delta_drift = 0.0;
    for (const auto& o : tr.observables) {
      tau_drift = std::max(tau_drift, std::abs(o.tau - tau0));
      delta_drift = std::max(delta_drift, std::abs(o.delta - delta0));
    }
    r.at_most("real-g pair: tau constant over one period", tau_drift, 1e-8);
    r.at_most("real-g pair: delta constant over one period", delta_drift, 1e-8);
  });
}

void suite_spatial(std::vector<VerifyCheck>& out) {
  Recorder r(out, "spatial");

  r.guarded("plane waves", [&](Recorder& r) {
    const Grid1D grid(-std::numbers::pi, std::numbers::pi, 256);
    CVector A(2), B(2);
    const double s = 1.0 / std::numbers::sqrt2;
    A << s, s;
    B << s, -s;
    const PlaneWaveSolution sol{{1, 3}, A, B, 1.0, 0.3, 0.0, {1.0, 0.5}, 0.0};
    const auto [psi0, phi0] = plane_wave_pair(grid, sol, 0.0);

    auto final_state = [&](double dt, SpatialTrajectory* keep) {
      SplitStepConfig cfg;
      cfg.dt = dt;
      SpatialTrajectory tr = evolve_pair_splitstep(psi0, phi0, sol.g, 0.0, 2.0, cfg);
      auto out = std::make_pair(*tr.psi_final, *tr.phi_final);
      if (keep) *keep = std::move(tr);
      return out;
    };
    SpatialTrajectory tr;
    const auto coarse = final_state(1e-3, &tr);
    double gdev = 0.0, ndrift = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      gdev = std::max(gdev, std::abs(std::abs(tr.gamma[i]) - 1.0 / std::cosh(tr.times[i])));
      ndrift = std::max(ndrift, std::abs(tr.N[i] - tr.N.front()) / tr.N.front());
    }
    r.at_most("|gamma| vs omega0 sech(2 b omega0 t)", gdev, 1e-4);
    r.at_most("relative N drift", ndrift, 1e-6);

    const auto fine = final_state(5e-4, nullptr);
    const auto reference = final_state(1.25e-4, nullptr);
    auto distance = [](const auto& a, const auto& b) {
      double sq = 0.0;
      for (std::size_t k = 0; k < a.first.values().size(); ++k)
        sq += std::norm(a.first.values()[k] - b.first.values()[k]) +
              std::norm(a.second.values()[k] - b.second.values()[k]);
      return std::sqrt(sq * a.first.grid().dx());
    };
    r.within("error ratio under dt halving", distance(coarse, reference) / distance(fine, reference),
             3.5, 4.5);
  });

  r.guarded("free spreading", [&](Recorder& r) {
    const Grid1D grid(-40.0, 40.0, 1024);
    const double sigma0 = 1.0;
    const WaveFunction1D psi0 = gaussian_packet(grid, 0.0, sigma0);
    const WaveFunction1D phi0 = gaussian_packet(grid, 0.0, sigma0, 1.0);
    SplitStepConfig cfg;
    cfg.dt = 0.01;
    const SpatialTrajectory tr = evolve_pair_splitstep(psi0, phi0, {0.0, 0.0}, 0.0, 2.0, cfg);
    const double t = 2.0;
    const double expected = sigma0 * std::sqrt(1.0 + std::pow(t / (2.0 * sigma0 * sigma0), 2));
    r.at_most("Gaussian width law with g = 0", std::abs(position_spread(*tr.psi_final) - expected),
              1e-8);
  });
}

}  // namespace

std::vector<VerifyCheck> run_verify_suite(const std::string& suite) {
  std::vector<VerifyCheck> out;
  const bool all = suite == "all";
  if (!all && suite != "reduced" && suite != "analytic" && suite != "integrator" &&
      suite != "appendix" && suite != "spatial")
    throw ConfigError("unknown suite '" + suite + "'");
  if (all || suite == "reduced") suite_reduced(out);
  if (all || suite == "analytic") suite_analytic(out);
  if (all || suite == "integrator") suite_integrator(out);
  if (all || suite == "appendix") suite_appendix(out);
  if (all || suite == "spatial") suite_spatial(out);
  return out;
}

void print_verify_table(std::ostream& out, const std::vector<VerifyCheck>& checks) {
  std::size_t width = 10;
  for (const auto& c : checks) width = std::max(width, c.suite.size() + c.name.size() + 2);
  std::size_t failed = 0;
  out << std::left << std::setw(static_cast<int>(width)) << "check" << "  " << std::setw(12)
      << "value" << "  " << std::setw(20) << "bound" << "result\n";
  for (const auto& c : checks) {
    std::ostringstream bound;
    bound << std::setprecision(3);
    if (c.lower == 0.0)
      bound << "<= " << c.upper;
    else
      bound << "[" << c.lower << ", " << c.upper << "]";
    out << std::left << std::setw(static_cast<int>(width)) << (c.suite + ": " + c.name) << "  "
        << std::setw(12) << std::setprecision(3) << std::scientific << c.value << std::defaultfloat
        << "  " << std::setw(20) << bound.str() << (c.passed ? "pass" : "FAIL") << '\n';
    if (!c.passed) ++failed;
  }
  out << checks.size() - failed << "/" << checks.size() << " checks passed\n";
}

}  // namespace nlqm::cli
