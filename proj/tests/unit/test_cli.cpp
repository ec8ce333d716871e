#include "nlqm/cli/config.hpp"
#include "nlqm/cli/runner.hpp"
#include "nlqm/cli/table.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

namespace nlqm::cli {
namespace {

namespace fs = std::filesystem;

/// Fresh scratch directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  ScratchDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("nlqm_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Runs the nlqm binary through the shell and returns its exit status.
int run_binary(const std::string& args) {
  const std::string cmd = std::string("\"") + NLQM_BIN + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(ParseComplex, Forms) {
  EXPECT_EQ(parse_complex("1"), cplx(1.0, 0.0));
  EXPECT_EQ(parse_complex("-0.5i"), cplx(0.0, -0.5));
  EXPECT_EQ(parse_complex("0.3+0.4i"), cplx(0.3, 0.4));
  EXPECT_EQ(parse_complex("2e-3-1i"), cplx(2e-3, -1.0));
  EXPECT_EQ(parse_complex("i"), cplx(0.0, 1.0));
  EXPECT_THROW(parse_complex("abc"), ConfigError);
  EXPECT_THROW(parse_complex(""), ConfigError);
}

TEST(ParseConfig, ReadsKeysAndComments) {
  const RunConfig c = parse_config(
      "# comment\n"
      "mode = reduced\n"
      "coupling.a = 0.25   # trailing\n"
      "coupling.b = -0.5\n"
      "time.samples = 11\n"
      "hamiltonian = diag(0, 1, 2)\n"
      "output.formats = csv\n");
  EXPECT_EQ(c.mode, Mode::reduced);
  EXPECT_EQ(c.coupling.a, 0.25);
  EXPECT_EQ(c.coupling.b, -0.5);
  EXPECT_EQ(c.n_samples, 11u);
  EXPECT_EQ(c.hamiltonian.kind, HamiltonianSource::Kind::diagonal);
  EXPECT_EQ(c.hamiltonian.energies, (std::vector<double>{0.0, 1.0, 2.0}));
  EXPECT_TRUE(c.write_csv);
  EXPECT_FALSE(c.write_json);
}

TEST(ParseConfig, DiagnosticsNameTheLine) {
  try {
    parse_config("mode = nonlinear\nbogus.key = 1\n", "cfg.txt");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg.txt:2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_config("mode nonlinear\n"), ConfigError);
  EXPECT_THROW(parse_config("time.samples = many\n"), ConfigError);
  EXPECT_THROW(parse_config("mode = sideways\n"), ConfigError);
}

TEST(ParseConfig, CrossFieldValidation) {
  // Parsing defers cross-field checks so --set overrides can complete a config.
  for (const char* text : {"time.start = 1\ntime.end = 0\n", "time.samples = 1\n",
                           "mode = spatial\nspatial.points = 100\n", "solution.A = 1, 0\n"}) {
    const RunConfig c = parse_config(text);
    EXPECT_THROW(c.validate(), ConfigError) << text;
  }
  EXPECT_NO_THROW(parse_config("").validate());
}

TEST(ApplyOverride, SetsAndDiagnoses) {
  RunConfig c;
  apply_override(c, "coupling.b=0.75");
  EXPECT_EQ(c.coupling.b, 0.75);
  EXPECT_THROW(apply_override(c, "coupling.b"), ConfigError);
  EXPECT_THROW(apply_override(c, "nope=1"), ConfigError);
  const auto keys = known_keys();
  EXPECT_NE(std::find(keys.begin(), keys.end(), "integrator.rhs_variant"), keys.end());
}

TEST(ParseGrid, Axes) {
  const auto grid = parse_grid("coupling.b=0.25,0.5;solution.vartheta=0,0.3,0.6");
  ASSERT_EQ(grid.size(), 2u);
  EXPECT_EQ(grid[0].key, "coupling.b");
  EXPECT_EQ(grid[1].values.size(), 3u);
  EXPECT_THROW(parse_grid(""), ConfigError);
  EXPECT_THROW(parse_grid("coupling.b"), ConfigError);
}

TEST(Table, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(1e-300), "1e-300");
  EXPECT_EQ(std::stod(format_double(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Table, CsvRoundTrip) {
  ScratchDir dir;
  Table t{{"t", "x"}, {{0.0, 1.5}, {0.5, -2.25}}};
  write_csv(dir.path() / "a.csv", t);
  const Table back = read_csv(dir.path() / "a.csv");
  EXPECT_EQ(back.columns, t.columns);
  EXPECT_EQ(back.rows, t.rows);
  write_file(dir.path() / "bad.csv", "t,x\n0,1\n1\n");
  EXPECT_THROW(read_csv(dir.path() / "bad.csv"), ConfigError);
  EXPECT_THROW(read_csv(dir.path() / "missing.csv"), ConfigError);
}

TEST(CompareTables, FieldsAndAlignment) {
  const Table a{{"t", "Re_psi_0", "Im_psi_0", "N"}, {{0.0, 1.0, 0.0, 2.0}, {1.0, 0.0, 1.0, 2.0}}};
  Table b = a;
  b.rows[1][1] = 3.0;
  b.rows[1][2] = 5.0;
  b.rows[0][3] = 2.5;
  EXPECT_DOUBLE_EQ(compare_tables(a, b, "N").front().max_abs, 0.5);
  EXPECT_DOUBLE_EQ(compare_tables(a, b, "psi").front().max_abs, 5.0);
  EXPECT_EQ(compare_tables(a, b, "all").size(), 3u);
  EXPECT_THROW(compare_tables(a, b, "missing"), ConfigError);
  Table shifted = a;
  shifted.rows[1][0] = 1.1;
  EXPECT_THROW(compare_tables(a, shifted, "N"), ContractViolation);
  Table shorter = a;
  shorter.rows.pop_back();
  EXPECT_THROW(compare_tables(a, shorter, "N"), ContractViolation);
}

RunConfig quick(Mode mode) {
  RunConfig c;
  c.mode = mode;
  c.n_samples = 21;
  return c;
}

TEST(Simulate, AnalyticAndNonlinearAgree) {
  const RunReport a = simulate(quick(Mode::analytic));
  const RunReport n = simulate(quick(Mode::nonlinear));
  EXPECT_EQ(a.status, "ok");
  EXPECT_EQ(n.status, "ok");
  EXPECT_LT(compare_tables(a.trajectory, n.trajectory, "psi").front().max_abs, 1e-6);
  EXPECT_EQ(a.trajectory.columns, trajectory_columns(4));
}

TEST(Simulate, PureCaseHasUnitPurity) {
  RunConfig c = quick(Mode::nonlinear);
  c.vartheta = 0.0;
  const RunReport r = simulate(c);
  for (double p : r.trajectory.column("purity")) EXPECT_NEAR(p, 1.0, 1e-12);
}

TEST(Simulate, OrthogonalInitialPairKeepsZeroGamma) {
  RunConfig c = quick(Mode::nonlinear);
  c.init = "orthogonal";
  const RunReport r = simulate(c);
  EXPECT_LT(r.max_abs_gamma, 1e-8);
}

TEST(Simulate, IntegrationFailureIsReported) {
  RunConfig c = quick(Mode::nonlinear);
  c.integrator.max_steps = 10;
  const RunReport r = simulate(c);
  EXPECT_EQ(r.status, "integration_failure");
  EXPECT_TRUE(r.last_good_time.has_value());
  EXPECT_EQ(r.exit_code(), 3);
}

TEST(Simulate, CheckFailureExitCode) {
  RunConfig c = quick(Mode::nonlinear);
  c.checks["max_oracle_deviation"] = 1e-30;
  EXPECT_EQ(simulate(c).exit_code(), 1);
}

TEST(Simulate, EveryModeRuns) {
  for (Mode m : {Mode::reduced, Mode::linearized, Mode::spatial}) {
    RunConfig c = quick(m);
    if (m == Mode::spatial) c.t_end = -1.9;
    EXPECT_EQ(simulate(c).status, "ok") << to_string(m);
  }
  RunConfig b = quick(Mode::appendix_b);
  b.coupling = {1.0, 0.0};
  EXPECT_EQ(simulate(b).status, "ok");
  RunConfig wrong = quick(Mode::appendix_b);
  EXPECT_EQ(run(wrong, std::cout, std::cerr), 2);
}

TEST(Run, ArtifactsAreByteIdentical) {
  ScratchDir dir;
  RunConfig c = quick(Mode::nonlinear);
  c.write_svg = true;
  std::ostringstream log;
  std::ostringstream err;
  c.output_dir = dir.path() / "one";
  ASSERT_EQ(run(c, log, err), 0) << err.str();
  c.output_dir = dir.path() / "two";
  ASSERT_EQ(run(c, log, err), 0) << err.str();
  for (const char* f : {"trajectory.csv", "observables.csv", "drift.json", "plots.svg"}) {
    const std::string one = slurp(dir.path() / "one" / f);
    EXPECT_FALSE(one.empty()) << f;
    EXPECT_EQ(one, slurp(dir.path() / "two" / f)) << f;
  }
}

TEST(WorkerCount, HonoursEnvironment) {
  ::setenv("NLQM_THREADS", "3", 1);
  EXPECT_EQ(worker_count(10), 3u);
  EXPECT_EQ(worker_count(2), 2u);
  ::setenv("NLQM_THREADS", "zero", 1);
  EXPECT_THROW(worker_count(10), ConfigError);
  ::unsetenv("NLQM_THREADS");
  EXPECT_GE(worker_count(10), 1u);
}

TEST(Binary, ExitCodes) {
  ScratchDir dir;
  const fs::path cfg = dir.path() / "run.cfg";
  write_file(cfg, "mode = nonlinear\ntime.samples = 11\noutput.directory = " +
                      (dir.path() / "out").string() + "\n");
  EXPECT_EQ(run_binary("run \"" + cfg.string() + "\""), 0);
  EXPECT_EQ(run_binary("run \"" + cfg.string() + "\" --set check.max_oracle_deviation=1e-30"), 1);
  EXPECT_EQ(run_binary("run \"" + cfg.string() + "\" --set integrator.max_steps=10"), 3);
  EXPECT_EQ(run_binary("run \"" + (dir.path() / "missing.cfg").string() + "\""), 2);
  EXPECT_EQ(run_binary("run \"" + cfg.string() + "\" --set no.such.key=1"), 2);
  EXPECT_EQ(run_binary("verify --suite reduced"), 0);
  EXPECT_EQ(run_binary("verify --suite nonsense"), 2);
  EXPECT_EQ(run_binary("frobnicate"), 2);
}

TEST(Binary, CompareAndSweep) {
  ScratchDir dir;
  const fs::path cfg = dir.path() / "run.cfg";
  write_file(cfg, "mode = analytic\ntime.samples = 11\noutput.directory = " +
                      (dir.path() / "sweep").string() + "\n");
  const std::string c = "\"" + cfg.string() + "\"";
  EXPECT_EQ(run_binary("compare " + c + " " + c + " --set-b mode=nonlinear --field psi --tol 1e-6"), 0);
  EXPECT_EQ(run_binary("compare " + c + " " + c + " --set-b time.samples=12 --field N"), 2);
  EXPECT_EQ(run_binary("sweep " + c + " --grid \"coupling.b=0.25,0.5\""), 0);
  EXPECT_TRUE(fs::exists(dir.path() / "sweep" / "sweep.csv"));
  EXPECT_TRUE(fs::exists(dir.path() / "sweep" / "run_0001" / "trajectory.csv"));
}

}  // namespace
}  // namespace nlqm::cli
