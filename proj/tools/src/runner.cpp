#include "nlqm/cli/runner.hpp"

#include "nlqm/analytic.hpp"
#include "nlqm/appendix.hpp"
#include "nlqm/cli/plot.hpp"
#include "nlqm/reduced.hpp"
#include "nlqm/spatial.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

namespace nlqm::cli {

namespace {

struct Observables {
  double N = 0.0;
  double tau = 0.0;
  cplx gamma{0.0, 0.0};
  double delta = 0.0;
  double omega0_sq = 0.0;
  double schwarz = 0.0;
  double purity = 1.0;
};

class TableBuilder {
 public:
  TableBuilder(RunReport& report, std::size_t dim) : report_(report), dim_(dim) {
    report_.trajectory.columns = trajectory_columns(dim);
    report_.observables.columns = {"t"};
    for (const auto& c : observable_columns()) report_.observables.columns.push_back(c);
  }

  void add(double t, const CVector& psi, const CVector& phi, const Observables& o) {
    std::vector<double> row;
    row.reserve(report_.trajectory.columns.size());
    row.push_back(t);
    for (std::size_t n = 0; n < dim_; ++n) {
      row.push_back(psi[static_cast<Eigen::Index>(n)].real());
      row.push_back(psi[static_cast<Eigen::Index>(n)].imag());
    }
    for (std::size_t n = 0; n < dim_; ++n) {
      row.push_back(phi[static_cast<Eigen::Index>(n)].real());
      row.push_back(phi[static_cast<Eigen::Index>(n)].imag());
    }
    const std::vector<double> obs{o.N,     o.tau,       o.gamma.real(), o.gamma.imag(),
                                  o.delta, o.omega0_sq, o.schwarz,      o.purity};
    row.insert(row.end(), obs.begin(), obs.end());
    report_.trajectory.rows.push_back(std::move(row));

    std::vector<double> orow{t};
    orow.insert(orow.end(), obs.begin(), obs.end());
    report_.observables.rows.push_back(std::move(orow));
    report_.max_abs_gamma = std::max(report_.max_abs_gamma, std::abs(o.gamma));
  }

  // Observables only (reduced mode): the state columns are absent.
  void add_reduced(double t, const Observables& o) {
    std::vector<double> row{t,       o.N,         o.tau,     o.gamma.real(), o.gamma.imag(),
                            o.delta, o.omega0_sq, o.schwarz, o.purity};
    report_.trajectory.rows.push_back(row);
    report_.observables.rows.push_back(std::move(row));
    report_.max_abs_gamma = std::max(report_.max_abs_gamma, std::abs(o.gamma));
  }

 private:
  RunReport& report_;
  std::size_t dim_;
};

void fill_from_trajectory(RunReport& report, const Trajectory& tr) {
  TableBuilder builder(report, static_cast<std::size_t>(tr.psi_states.front().dim()));
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const ReducedState& r = tr.observables[i];
    builder.add(tr.times[i], tr.psi_states[i].amplitudes(), tr.phi_states[i].amplitudes(),
                {r.N, r.tau, r.gamma, r.delta, r.omega0_squared(), tr.schwarz[i], tr.purity[i]});
  }
  report.drift = tr.drift;
  report.stats = tr.stats;
}

double state_deviation(const Trajectory& tr, const std::vector<StatePair>& oracle) {
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    worst = std::max(worst, (tr.psi_states[i].amplitudes() - oracle[i].psi.amplitudes()).norm());
    worst = std::max(worst, (tr.phi_states[i].amplitudes() - oracle[i].phi.amplitudes()).norm());
  }
  return worst;
}

HermitianOperator hamiltonian_from_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("hamiltonian: cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("hamiltonian: '" + path.string() + "' is not valid JSON: " + e.what());
  }
  try {
    if (j.contains("diagonal")) {
      const auto e = j.at("diagonal").get<std::vector<double>>();
      if (e.empty()) throw ConfigError("hamiltonian: empty diagonal");
      return HermitianOperator::diagonal(e);
    }
    const auto re = j.at("real").get<std::vector<std::vector<double>>>();
    const auto n = re.size();
    std::vector<std::vector<double>> im(n, std::vector<double>(n, 0.0));
    if (j.contains("imag")) im = j.at("imag").get<std::vector<std::vector<double>>>();
    if (n == 0 || im.size() != n) throw ConfigError("hamiltonian: matrix shape mismatch");
    CMatrix M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
      if (re[r].size() != n || im[r].size() != n)
        throw ConfigError("hamiltonian: matrix must be square");
      for (std::size_t c = 0; c < n; ++c)
        M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = {re[r][c], im[r][c]};
    }
    return HermitianOperator(M);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("hamiltonian: '" + path.string() +
                      "' needs {\"diagonal\": [...]} or {\"real\": [[...]], \"imag\": [[...]]}: " +
                      e.what());
  }
}

std::pair<CVector, CVector> channels(const RunConfig& c, Eigen::Index dim) {
  if (c.A) {
    if (c.A->size() != dim)
      throw ConfigError("solution.A: length " + std::to_string(c.A->size()) +
                        " does not match dimension " + std::to_string(dim));
    return {*c.A, *c.B};
  }
  return random_orthonormal_pair(dim, c.pair_seed);
}

AnalyticSolution build_solution(const RunConfig& c, const HermitianOperator& H) {
  auto [A, B] = channels(c, H.dim());
  return validate_spec({std::move(A), std::move(B), c.omega0, c.vartheta, c.theta, c.coupling, H,
                        c.t0});
}

void run_pair_mode(const RunConfig& c, RunReport& report) {
  const HermitianOperator H = build_hamiltonian(c.hamiltonian);
  const auto times = uniform_times(c.t_start, c.t_end, c.n_samples);
  const bool orthogonal = c.init == "orthogonal";

  std::vector<StatePair> oracle;
  oracle.reserve(times.size());
  std::optional<AnalyticSolution> sol;
  if (orthogonal) {
    if (c.mode == Mode::analytic)
      throw ConfigError("solution.init: orthogonal applies to nonlinear and linearized modes");
    const auto [A, B] = channels(c, H.dim());
    const StateVector A_std(H.from_eigenbasis(A));
    const StateVector B_std(H.from_eigenbasis(B));
    for (double t : times) oracle.push_back(exceptional_solution(A_std, B_std, H, t));
    report.oracle_description = "linear evolution of the orthogonal pair (gamma = 0)";
  } else {
    sol = build_solution(c, H);
    for (double t : times) oracle.push_back(state_pair_at(*sol, t));
    report.oracle_description = "closed-form pair";
  }

  Trajectory tr;
  switch (c.mode) {
    case Mode::analytic: {
      std::vector<StateVector> psi, phi;
      for (const auto& p : oracle) {
        psi.push_back(p.psi);
        phi.push_back(p.phi);
      }
      tr = make_trajectory(times, std::move(psi), std::move(phi));
      // Against the reduced closed forms instead of itself.
      const ReducedParams p = sol->reduced_params();
      double worst = 0.0;
      for (std::size_t i = 0; i < times.size(); ++i) {
        const auto td = tau_delta_analytic(p, times[i]);
        worst = std::max({worst, std::abs(tr.observables[i].tau - td.tau),
                          std::abs(tr.observables[i].gamma - gamma_analytic(p, times[i]))});
      }
      fill_from_trajectory(report, tr);
      report.oracle_deviation = worst;
      report.oracle_description = "reduced closed forms (tau, gamma)";
      return;
    }
    case Mode::nonlinear:
      tr = integrate(oracle.front().psi, oracle.front().phi, H, c.coupling, times, c.integrator,
                     c.rhs_variant);
      break;
    case Mode::linearized: {
      GammaFunction gamma_fn = [](double) { return cplx(0.0, 0.0); };
      if (sol) {
        const ReducedParams p = sol->reduced_params();
        gamma_fn = [p](double t) { return gamma_analytic(p, t); };
      }
      tr = integrate_linearized(oracle.front().psi, oracle.front().phi, H, c.coupling, gamma_fn,
                                times, c.integrator);
      break;
    }
    default: throw Error("run_pair_mode: unexpected mode");
  }
  fill_from_trajectory(report, tr);
  report.oracle_deviation = state_deviation(tr, oracle);
}

Observables reduced_observables_of(const ReducedState& s) {
  Observables o{s.N, s.tau, s.gamma, s.delta, s.omega0_squared(), 0.0, 1.0};
  o.schwarz = 0.25 * (s.N * s.N - s.tau * s.tau) - s.delta;
  o.purity = 1.0 - 2.0 * o.schwarz / (s.N * s.N);
  return o;
}

void run_reduced_mode(const RunConfig& c, RunReport& report) {
  const ReducedParams p{c.omega0, c.theta, c.coupling, c.t0};
  p.validate();
  const auto times = uniform_times(c.t_start, c.t_end, c.n_samples);
  const auto td = tau_delta_analytic(p, c.t_start);
  const cplx g0 = gamma_analytic(p, c.t_start);
  const ReducedState init{2.0 * c.omega0 * std::cosh(2.0 * c.vartheta), td.tau, g0, std::norm(g0)};
  const ReducedTrajectory tr = integrate_reduced(init, c.coupling, times, c.integrator);

  TableBuilder builder(report, 0);  // dimension 0: no state columns in this mode

  const Observables first = reduced_observables_of(tr.states.front());
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const ReducedState& s = tr.states[i];
    const Observables o = reduced_observables_of(s);
    builder.add_reduced(tr.times[i], o);
    auto& d = report.drift;
    d.max_rel_N_drift = std::max(d.max_rel_N_drift, std::abs(o.N - first.N) / std::abs(first.N));
    d.max_omega0_sq_drift = std::max(d.max_omega0_sq_drift, std::abs(o.omega0_sq - first.omega0_sq));
    d.max_delta_residual = std::max(d.max_delta_residual, std::abs(s.delta - std::norm(s.gamma)));
    d.max_schwarz_drift = std::max(d.max_schwarz_drift, std::abs(o.schwarz - first.schwarz));
    const auto an = tau_delta_analytic(p, tr.times[i]);
    worst = std::max({worst, std::abs(s.tau - an.tau),
                      std::abs(s.gamma - gamma_analytic(p, tr.times[i]))});
  }
  report.stats = tr.stats;
  report.oracle_deviation = worst;
  report.oracle_description = "reduced closed forms (tau, gamma)";
}

void run_spatial_mode(const RunConfig& c, RunReport& report) {
  const Grid1D grid(c.x_min, c.x_max, c.n_points);
  const auto m = static_cast<Eigen::Index>(c.modes.size());
  CVector A(m), B(m);
  if (c.A) {
    A = *c.A;
    B = *c.B;
  } else if (m == 2) {
    const double r = 1.0 / std::numbers::sqrt2;
    A << r, r;
    B << r, -r;
  } else {
    std::tie(A, B) = random_orthonormal_pair(m, c.pair_seed);
  }

  const PlaneWaveSolution sol{c.modes, A, B, c.omega0, c.vartheta, c.theta, c.coupling, c.t0};
  std::optional<WaveFunction1D> psi0, phi0;
  const bool orthogonal = c.init == "orthogonal";
  if (orthogonal) {
    if (std::abs(B.dot(A)) > 1e-10 * A.norm() * B.norm())
      throw ConfigError("solution.A / solution.B: orthogonal init needs orthogonal channels");
    psi0 = plane_wave_superposition(grid, c.modes, A);
    phi0 = plane_wave_superposition(grid, c.modes, B);
  } else {
    auto [p, f] = plane_wave_pair(grid, sol, c.t_start);
    psi0 = std::move(p);
    phi0 = std::move(f);
  }

  const double interval = (c.t_end - c.t_start) / static_cast<double>(c.n_samples - 1);
  const auto per_sample =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(interval / c.dt)));
  SplitStepConfig cfg;
  cfg.dt = interval / static_cast<double>(per_sample);
  cfg.record_every = per_sample;
  const SpatialTrajectory tr = evolve_pair_splitstep(*psi0, *phi0, c.coupling, c.t_start, c.t_end, cfg);

  const ReducedParams p{c.omega0, c.theta, c.coupling, c.t0};
  TableBuilder builder(report, grid.size());
  const double dx = grid.dx();
  double first_N = 0.0, first_w2 = 0.0, first_S = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < tr.snapshot_times.size(); ++i) {
    const auto& psi = tr.psi_snapshots[i];
    const auto& phi = tr.phi_snapshots[i];
    const double pp = psi.norm_squared();
    const double ff = phi.norm_squared();
    const cplx gamma = overlap(phi, psi);
    Observables o{pp + ff, pp - ff, gamma, std::norm(gamma), 0.0, pp * ff - std::norm(gamma), 0.0};
    o.omega0_sq = 0.25 * o.tau * o.tau + o.delta;
    o.purity = (pp * pp + ff * ff + 2.0 * o.delta) / (o.N * o.N);
    if (i == 0) {
      first_N = o.N;
      first_w2 = o.omega0_sq;
      first_S = o.schwarz;
    }
    auto& d = report.drift;
    d.max_rel_N_drift = std::max(d.max_rel_N_drift, std::abs(o.N - first_N) / first_N);
    d.max_omega0_sq_drift = std::max(d.max_omega0_sq_drift, std::abs(o.omega0_sq - first_w2));
    d.max_schwarz_drift = std::max(d.max_schwarz_drift, std::abs(o.schwarz - first_S));
    d.max_purity_residual =
        std::max(d.max_purity_residual, std::abs(o.purity - (1.0 - 2.0 * o.schwarz / (o.N * o.N))));
    const cplx expected = orthogonal ? cplx(0.0, 0.0) : gamma_analytic(p, tr.snapshot_times[i]);
    worst = std::max(worst, std::abs(gamma - expected));

    // Grid samples scaled by sqrt(dx) so the state columns are l2-normalised like the
    // finite-dimensional case.
    CVector ps(static_cast<Eigen::Index>(grid.size())), ph(ps.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      ps[static_cast<Eigen::Index>(k)] = psi.values()[k] * std::sqrt(dx);
      ph[static_cast<Eigen::Index>(k)] = phi.values()[k] * std::sqrt(dx);
    }
    builder.add(tr.snapshot_times[i], ps, ph, o);
  }
  report.oracle_deviation = worst;
  report.oracle_description = orthogonal ? "gamma = 0" : "closed-form gamma";
  report.stats.accepted_steps = tr.times.size() - 1;
}

void run_appendix_a(const RunConfig& c, RunReport& report) {
  const HermitianOperator H = build_hamiltonian(c.hamiltonian);
  const auto times = uniform_times(c.t_start, c.t_end, c.n_samples);
  const double b = c.coupling.b;

  double n0 = c.appendix_norm;
  if (b != 0.0) {
    // The closed form exists on the whole interval only if both ends are inside the window.
    n0 = single_vector_complex_g_norm(b, c.appendix_t0, c.t_start);
    (void)single_vector_complex_g_norm(b, c.appendix_t0, c.t_end);
  }
  const CVector unit = random_state(H.dim(), c.pair_seed).amplitudes();
  const StateVector psi0(H.from_eigenbasis(unit) * std::sqrt(n0));
  const SingleVectorTrajectory tr = integrate_single_vector(psi0, H, c.coupling, times, c.integrator);

  std::vector<StateVector> phi(times.size(), StateVector(CVector::Zero(H.dim())));
  const Trajectory full = make_trajectory(tr.times, tr.states, std::move(phi));
  fill_from_trajectory(report, full);
  report.stats = tr.stats;

  double worst = 0.0;
  if (b == 0.0) {
    const SingleVectorSpec spec{unit * std::sqrt(n0), c.coupling, c.appendix_t0, H};
    for (std::size_t i = 0; i < times.size(); ++i)
      worst = std::max(worst, (tr.states[i].amplitudes() -
                               single_vector_real_g(spec, times[i]).amplitudes()).norm());
    report.oracle_description = "closed-form single vector (real g)";
  } else {
    for (std::size_t i = 0; i < times.size(); ++i)
      worst = std::max(worst, std::abs(tr.norms[i] -
                                       single_vector_complex_g_norm(b, c.appendix_t0, times[i])));
    report.oracle_description = "norm law -1 / (2 b (t - t0))";
  }
  report.oracle_deviation = worst;
}

void run_appendix_b(const RunConfig& c, RunReport& report) {
  if (c.coupling.b != 0.0)
    throw ConfigError("coupling.b: appendix_b is the real-coupling case and needs b = 0");
  const HermitianOperator H = build_hamiltonian(c.hamiltonian);
  const auto times = uniform_times(c.t_start, c.t_end, c.n_samples);
  const double k = real_g_k(c.tau0, c.delta0);
  auto [a_unit, b_unit] = channels(c, H.dim());
  a_unit.normalize();
  b_unit.normalize();
  const double beta = std::sqrt((1.0 + c.alpha * c.alpha / k) / k);
  const RealGSolution sol = validate_real_g({c.alpha * a_unit, beta * b_unit, c.tau0, c.delta0,
                                             std::polar(std::sqrt(c.delta0), c.gamma0_phase),
                                             c.coupling.a, H});
  std::vector<StatePair> oracle;
  for (double t : times) oracle.push_back(real_g_state_pair(sol, t));
  const Trajectory tr = integrate(oracle.front().psi, oracle.front().phi, H, c.coupling, times,
                                  c.integrator, c.rhs_variant);
  fill_from_trajectory(report, tr);
  report.oracle_deviation = state_deviation(tr, oracle);
  report.oracle_description = "closed-form real-g pair";
}

void run_verify_mode(const RunConfig& c, RunReport& report) {
  report.verify = run_verify_suite(c.verify_suite);
  for (const auto& v : report.verify)
    if (!v.passed) report.status = "check_failure";
}

std::optional<double> check_value(const RunReport& r, const std::string& name) {
  if (name == "max_rel_N_drift") return r.drift.max_rel_N_drift;
  if (name == "max_omega0_sq_drift") return r.drift.max_omega0_sq_drift;
  if (name == "max_delta_residual") return r.drift.max_delta_residual;
  if (name == "max_schwarz_drift") return r.drift.max_schwarz_drift;
  if (name == "max_purity_residual") return r.drift.max_purity_residual;
  if (name == "max_oracle_deviation") return r.oracle_deviation;
  if (name == "max_abs_gamma") return r.max_abs_gamma;
  return std::nullopt;
}

nlohmann::json drift_json(const RunConfig& c, const RunReport& r) {
  nlohmann::json j;
  j["mode"] = std::string(to_string(r.mode));
  j["status"] = r.status;
  if (!r.message.empty()) j["message"] = r.message;
  j["last_good_time"] = r.last_good_time ? nlohmann::json(*r.last_good_time) : nlohmann::json();
  j["samples"] = r.trajectory.rows.size();
  j["drift"] = {{"max_rel_N_drift", r.drift.max_rel_N_drift},
                {"max_omega0_sq_drift", r.drift.max_omega0_sq_drift},
                {"max_delta_residual", r.drift.max_delta_residual},
                {"max_schwarz_drift", r.drift.max_schwarz_drift},
                {"max_purity_residual", r.drift.max_purity_residual}};
  j["oracle"] = {{"description", r.oracle_description},
                 {"max_deviation", r.oracle_deviation ? nlohmann::json(*r.oracle_deviation)
                                                      : nlohmann::json()}};
  j["max_abs_gamma"] = r.max_abs_gamma;
  j["stats"] = {{"accepted_steps", r.stats.accepted_steps},
                {"rejected_steps", r.stats.rejected_steps},
                {"rhs_evaluations", r.stats.rhs_evaluations}};
  j["config"] = {{"hamiltonian", c.hamiltonian.describe()},
                 {"coupling", {c.coupling.a, c.coupling.b}},
                 {"omega0", c.omega0},
                 {"vartheta", c.vartheta},
                 {"theta", c.theta},
                 {"t0", c.t0},
                 {"time", {c.t_start, c.t_end, c.n_samples}},
                 {"integrator", std::string(to_string(c.integrator.method))},
                 {"rhs_variant", std::string(to_string(c.rhs_variant))}};
  auto checks = nlohmann::json::array();
  for (const auto& ch : r.checks)
    checks.push_back({{"name", ch.name}, {"value", ch.value}, {"tolerance", ch.upper},
                      {"passed", ch.passed}});
  j["checks"] = checks;
  if (!r.verify.empty()) {
    auto v = nlohmann::json::array();
    for (const auto& ch : r.verify)
      v.push_back({{"suite", ch.suite}, {"name", ch.name}, {"value", ch.value},
                   {"lower", ch.lower}, {"upper", ch.upper}, {"passed", ch.passed}});
    j["verify"] = v;
  }
  return j;
}

std::optional<std::size_t> parse_thread_env() {
  const char* env = std::getenv("NLQM_THREADS");
  if (env == nullptr || *env == '\0') return std::nullopt;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw ConfigError("NLQM_THREADS must be a positive integer");
  return static_cast<std::size_t>(v);
}

}  // namespace

int RunReport::exit_code() const noexcept {
  if (status == "integration_failure") return kNumericalFailure;
  if (status == "check_failure") return kCheckFailure;
  return kSuccess;
}

std::vector<std::string> trajectory_columns(std::size_t dim) {
  std::vector<std::string> cols{"t"};
  for (const char* name : {"psi", "phi"})
    for (std::size_t n = 0; n < dim; ++n) {
      cols.push_back("Re_" + std::string(name) + "_" + std::to_string(n));
      cols.push_back("Im_" + std::string(name) + "_" + std::to_string(n));
    }
  for (const auto& c : observable_columns()) cols.push_back(c);
  return cols;
}

const std::vector<std::string>& observable_columns() {
  static const std::vector<std::string> cols{"N",     "tau",       "Re_gamma", "Im_gamma",
                                             "delta", "omega0_sq", "schwarz",  "purity"};
  return cols;
}

HermitianOperator build_hamiltonian(const HamiltonianSource& source) {
  switch (source.kind) {
    case HamiltonianSource::Kind::random: return random_hermitian(source.dim, source.seed);
    case HamiltonianSource::Kind::diagonal: return HermitianOperator::diagonal(source.energies);
    case HamiltonianSource::Kind::file: return hamiltonian_from_json(source.path);
  }
  throw ConfigError("hamiltonian: unknown source");
}

RunReport simulate(const RunConfig& config) {
  config.validate();
  RunReport report;
  report.mode = config.mode;
  try {
    switch (config.mode) {
      case Mode::analytic:
      case Mode::nonlinear:
      case Mode::linearized: run_pair_mode(config, report); break;
      case Mode::reduced: run_reduced_mode(config, report); break;
      case Mode::spatial: run_spatial_mode(config, report); break;
      case Mode::appendix_a: run_appendix_a(config, report); break;
      case Mode::appendix_b: run_appendix_b(config, report); break;
      case Mode::verify: run_verify_mode(config, report); break;
    }
  } catch (const IntegrationFailure& e) {
    report.status = "integration_failure";
    report.message = e.what();
    report.last_good_time = e.last_good_time();
    return report;
  }

  for (const auto& [name, tol] : config.checks) {
    const auto value = check_value(report, name);
    CheckResult ch{name, value.value_or(std::numeric_limits<double>::quiet_NaN()), 0.0, tol, false};
    ch.passed = value.has_value() && *value <= tol;
    if (!ch.passed) report.status = "check_failure";
    report.checks.push_back(ch);
  }
  return report;
}

void write_artifacts(const RunConfig& config, const RunReport& report) {
  std::filesystem::create_directories(config.output_dir);
  const bool have_rows = !report.trajectory.rows.empty();
  if (config.write_csv && have_rows) {
    write_csv(config.output_dir / "trajectory.csv", report.trajectory);
    write_csv(config.output_dir / "observables.csv", report.observables);
  }
  if (config.write_json) {
    std::ofstream out(config.output_dir / "drift.json", std::ios::binary);
    out << drift_json(config, report).dump(2) << '\n';
    if (!out) throw Error("cannot write drift.json in '" + config.output_dir.string() + "'");
  }
  if (config.write_svg && have_rows) {
    std::ofstream out(config.output_dir / "plots.svg", std::ios::binary);
    write_svg_plots(out, report.observables);
    if (!out) throw Error("cannot write plots.svg in '" + config.output_dir.string() + "'");
  }
}

int run(const RunConfig& config, std::ostream& log, std::ostream& err) {
  RunReport report;
  try {
    report = simulate(config);
    write_artifacts(config, report);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ContractViolation& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const WrongCaseError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ExistenceWindowError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DegenerateInput& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }

  if (report.mode == Mode::verify) {
    print_verify_table(log, report.verify);
  } else {
    log << "mode " << to_string(report.mode) << ": " << report.trajectory.rows.size()
        << " samples, status " << report.status << '\n';
    if (report.status == "integration_failure") {
      err << "integration failure: " << report.message << '\n';
    } else {
      log << std::setprecision(3) << std::scientific;
      log << "  N drift " << report.drift.max_rel_N_drift << ", omega0^2 drift "
          << report.drift.max_omega0_sq_drift << ", Schwarz drift "
          << report.drift.max_schwarz_drift << '\n';
      if (report.oracle_deviation)
        log << "  max deviation from " << report.oracle_description << ": "
            << *report.oracle_deviation << '\n';
      log << std::defaultfloat;
    }
    for (const auto& ch : report.checks)
      log << "  check " << ch.name << ": " << ch.value << " <= " << ch.upper << " "
          << (ch.passed ? "pass" : "FAIL") << '\n';
  }
  return report.exit_code();
}

Table load_comparison_source(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  if (path.extension() == ".csv") {
    if (!overrides.empty()) throw ConfigError("--set overrides do not apply to CSV inputs");
    return read_csv(path);
  }
  RunConfig config = load_config(path);
  for (const auto& o : overrides) apply_override(config, o);
  if (config.mode == Mode::verify) throw ConfigError("compare: verify mode has no trajectory");
  RunReport report = simulate(config);
  if (report.status == "integration_failure")
    throw IntegrationFailure("compare: " + report.message, report.last_good_time.value_or(0.0));
  return std::move(report.trajectory);
}

std::vector<SweepAxis> parse_grid(std::string_view spec) {
  std::vector<SweepAxis> axes;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto end = spec.find(';', start);
    std::string_view part = spec.substr(start, end == std::string_view::npos ? end : end - start);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    if (!part.empty()) {
      const auto eq = part.find('=');
      if (eq == std::string_view::npos || eq == 0)
        throw ConfigError("--grid: expected key=v1,v2,... in '" + std::string(part) + "'");
      SweepAxis axis{std::string(part.substr(0, eq)), {}};
      std::string_view values = part.substr(eq + 1);
      std::size_t vs = 0;
      while (vs <= values.size()) {
        const auto ve = values.find(',', vs);
        auto v = values.substr(vs, ve == std::string_view::npos ? ve : ve - vs);
        while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
        while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
        if (v.empty()) throw ConfigError("--grid: empty value for '" + axis.key + "'");
        axis.values.emplace_back(v);
        if (ve == std::string_view::npos) break;
        vs = ve + 1;
      }
      axes.push_back(std::move(axis));
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  if (axes.empty()) throw ConfigError("--grid: no axes");
  return axes;
}

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = parse_thread_env().value_or(std::max(1u, std::thread::hardware_concurrency()));
  return std::max<std::size_t>(1, std::min(n, jobs));
}

int sweep(const RunConfig& base, const std::vector<SweepAxis>& grid, std::ostream& log,
          std::ostream& err) {
  std::size_t total = 1;
  for (const auto& axis : grid) total *= axis.values.size();

  // Build and validate every run up front so config errors surface before any work.
  std::vector<RunConfig> configs;
  std::vector<std::vector<std::string>> assignments;
  configs.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    RunConfig c = base;
    std::vector<std::string> values;
    std::size_t rem = idx;
    for (std::size_t a = grid.size(); a-- > 0;) {
      const auto& axis = grid[a];
      values.insert(values.begin(), axis.values[rem % axis.values.size()]);
      rem /= axis.values.size();
    }
    for (std::size_t a = 0; a < grid.size(); ++a) {
      try {
        set_key(c, grid[a].key, values[a]);
      } catch (const ConfigError& e) {
        err << "config error: --grid " << e.what() << '\n';
        return kConfigError;
      }
    }
    std::ostringstream name;
    name << "run_" << std::setw(4) << std::setfill('0') << idx;
    c.output_dir = base.output_dir / name.str();
    configs.push_back(std::move(c));
    assignments.push_back(std::move(values));
  }

  std::size_t workers = 1;
  try {
    workers = worker_count(total);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  std::vector<int> codes(total, 0);
  std::vector<std::string> logs(total), errs(total);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < total; i = next++) {
          std::ostringstream lo, er;
          codes[i] = run(configs[i], lo, er);
          logs[i] = lo.str();
          errs[i] = er.str();
        }
      });
  }

  std::filesystem::create_directories(base.output_dir);
  std::ofstream manifest(base.output_dir / "sweep.csv", std::ios::binary);
  manifest << "run";
  for (const auto& axis : grid) manifest << ',' << axis.key;
  manifest << ",exit_code\n";
  int worst = kSuccess;
  for (std::size_t i = 0; i < total; ++i) {
    std::ostringstream name;
    name << "run_" << std::setw(4) << std::setfill('0') << i;
    manifest << name.str();
    for (const auto& v : assignments[i]) manifest << ',' << v;
    manifest << ',' << codes[i] << '\n';
    log << "[" << name.str() << "] exit " << codes[i] << '\n' << logs[i];
    err << errs[i];
    worst = std::max(worst, codes[i]);
  }
  log << "sweep: " << total << " runs on " << workers << " workers\n";
  return worst;
}

}  // namespace nlqm::cli
