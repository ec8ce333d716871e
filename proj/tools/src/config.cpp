#include "nlqm/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace nlqm::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (text.size() > 1 && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw std::invalid_argument("expected a number, got '" + std::string(text) + "'");
  if (!std::isfinite(v)) throw std::invalid_argument("value must be finite");
  return v;
}

template <class Int>
Int parse_integer(std::string_view text) {
  text = trim(text);
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw std::invalid_argument("expected a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

double positive(double v, std::string_view what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be > 0");
  return v;
}

cplx parse_complex_literal(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw std::invalid_argument("empty complex literal");
  if (text.back() != 'i') return {parse_double(text), 0.0};
  std::string_view body = text.substr(0, text.size() - 1);
  // Split at the last sign that is not part of an exponent and not leading.
  std::size_t split_at = std::string_view::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split_at = k;
      break;
    }
  }
  auto imag_part = [](std::string_view s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_double(s.front() == '+' ? s.substr(1) : s);
  };
  if (split_at == std::string_view::npos) return {0.0, imag_part(body)};
  return {parse_double(body.substr(0, split_at)), imag_part(body.substr(split_at))};
}

CVector parse_complex_list(std::string_view text) {
  const auto parts = split(text, ',');
  CVector v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = parse_complex_literal(parts[i]);
  return v;
}

// "name(arg, arg, ...)" -> name and argument list; nullopt if not in call form.
std::optional<std::pair<std::string_view, std::vector<std::string_view>>> parse_call(
    std::string_view text) {
  const auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') return std::nullopt;
  const auto name = trim(text.substr(0, open));
  const auto inner = trim(text.substr(open + 1, text.size() - open - 2));
  return std::make_pair(name, inner.empty() ? std::vector<std::string_view>{} : split(inner, ','));
}

HamiltonianSource parse_hamiltonian(std::string_view text) {
  HamiltonianSource h;
  if (const auto call = parse_call(text)) {
    const auto& [name, args] = *call;
    if (name == "random") {
      if (args.size() != 2) throw std::invalid_argument("random(dim, seed) takes two arguments");
      h.kind = HamiltonianSource::Kind::random;
      h.dim = parse_integer<Eigen::Index>(args[0]);
      if (h.dim < 1) throw std::invalid_argument("dim must be >= 1");
      h.seed = parse_integer<std::uint64_t>(args[1]);
      return h;
    }
    if (name == "diag") {
      if (args.empty()) throw std::invalid_argument("diag(...) needs at least one energy");
      h.kind = HamiltonianSource::Kind::diagonal;
      for (auto a : args) h.energies.push_back(parse_double(a));
      h.dim = static_cast<Eigen::Index>(h.energies.size());
      return h;
    }
    throw std::invalid_argument("unknown Hamiltonian form '" + std::string(name) +
                                "' (expected random(dim, seed), diag(...) or a file path)");
  }
  if (text.empty()) throw std::invalid_argument("empty Hamiltonian");
  h.kind = HamiltonianSource::Kind::file;
  h.path = std::string(text);
  return h;
}

Mode parse_mode(std::string_view text) {
  static const std::unordered_map<std::string_view, Mode> table{
      {"analytic", Mode::analytic},     {"nonlinear", Mode::nonlinear},
      {"linearized", Mode::linearized}, {"reduced", Mode::reduced},
      {"spatial", Mode::spatial},       {"appendix_a", Mode::appendix_a},
      {"appendix_b", Mode::appendix_b}, {"verify", Mode::verify}};
  const auto it = table.find(text);
  if (it == table.end()) throw std::invalid_argument("unknown mode '" + std::string(text) + "'");
  return it->second;
}

const std::vector<std::string_view>& check_names() {
  static const std::vector<std::string_view> names{
      "max_rel_N_drift",     "max_omega0_sq_drift",  "max_delta_residual",
      "max_schwarz_drift",   "max_purity_residual",  "max_oracle_deviation",
      "max_abs_gamma"};
  return names;
}

using Setter = std::function<void(RunConfig&, std::string_view)>;

const std::unordered_map<std::string_view, Setter>& setters() {
  static const std::unordered_map<std::string_view, Setter> table{
      {"mode", [](RunConfig& c, std::string_view v) { c.mode = parse_mode(v); }},
      {"hamiltonian",
       [](RunConfig& c, std::string_view v) { c.hamiltonian = parse_hamiltonian(v); }},
      {"coupling.a", [](RunConfig& c, std::string_view v) { c.coupling.a = parse_double(v); }},
      {"coupling.b", [](RunConfig& c, std::string_view v) { c.coupling.b = parse_double(v); }},
      {"solution.omega0",
       [](RunConfig& c, std::string_view v) { c.omega0 = positive(parse_double(v), "omega0"); }},
      {"solution.vartheta", [](RunConfig& c, std::string_view v) { c.vartheta = parse_double(v); }},
      {"solution.theta", [](RunConfig& c, std::string_view v) { c.theta = parse_double(v); }},
      {"solution.t0", [](RunConfig& c, std::string_view v) { c.t0 = parse_double(v); }},
      {"solution.seed",
       [](RunConfig& c, std::string_view v) { c.pair_seed = parse_integer<std::uint64_t>(v); }},
      {"solution.A", [](RunConfig& c, std::string_view v) { c.A = parse_complex_list(v); }},
      {"solution.B", [](RunConfig& c, std::string_view v) { c.B = parse_complex_list(v); }},
      {"solution.init",
       [](RunConfig& c, std::string_view v) {
         if (v != "analytic" && v != "orthogonal")
           throw std::invalid_argument("expected analytic or orthogonal");
         c.init = std::string(v);
       }},
      {"time.start", [](RunConfig& c, std::string_view v) { c.t_start = parse_double(v); }},
      {"time.end", [](RunConfig& c, std::string_view v) { c.t_end = parse_double(v); }},
      {"time.samples",
       [](RunConfig& c, std::string_view v) { c.n_samples = parse_integer<std::size_t>(v); }},
      {"integrator.method",
       [](RunConfig& c, std::string_view v) { c.integrator.method = method_from_string(v); }},
      {"integrator.abs_tol",
       [](RunConfig& c, std::string_view v) {
         c.integrator.abs_tol = positive(parse_double(v), "abs_tol");
       }},
      {"integrator.rel_tol",
       [](RunConfig& c, std::string_view v) {
         c.integrator.rel_tol = positive(parse_double(v), "rel_tol");
       }},
      {"integrator.max_step",
       [](RunConfig& c, std::string_view v) {
         c.integrator.max_step = positive(parse_double(v), "max_step");
       }},
      {"integrator.initial_step",
       [](RunConfig& c, std::string_view v) {
         c.integrator.initial_step = positive(parse_double(v), "initial_step");
       }},
      {"integrator.max_steps",
       [](RunConfig& c, std::string_view v) {
         c.integrator.max_steps = parse_integer<std::size_t>(v);
       }},
      {"integrator.rhs_variant",
       [](RunConfig& c, std::string_view v) { c.rhs_variant = rhs_variant_from_string(v); }},
      {"spatial.x_min", [](RunConfig& c, std::string_view v) { c.x_min = parse_double(v); }},
      {"spatial.x_max", [](RunConfig& c, std::string_view v) { c.x_max = parse_double(v); }},
      {"spatial.points",
       [](RunConfig& c, std::string_view v) { c.n_points = parse_integer<std::size_t>(v); }},
      {"spatial.dt",
       [](RunConfig& c, std::string_view v) { c.dt = positive(parse_double(v), "dt"); }},
      {"spatial.modes",
       [](RunConfig& c, std::string_view v) {
         c.modes.clear();
         for (auto part : split(v, ',')) {
           int m = 0;
           const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), m);
           if (ec != std::errc() || ptr != part.data() + part.size() || part.empty())
             throw std::invalid_argument("expected integer mode numbers");
           c.modes.push_back(m);
         }
       }},
      {"appendix.t0", [](RunConfig& c, std::string_view v) { c.appendix_t0 = parse_double(v); }},
      {"appendix.norm",
       [](RunConfig& c, std::string_view v) {
         c.appendix_norm = positive(parse_double(v), "appendix.norm");
       }},
      {"appendix.tau0", [](RunConfig& c, std::string_view v) { c.tau0 = parse_double(v); }},
      {"appendix.delta0",
       [](RunConfig& c, std::string_view v) { c.delta0 = positive(parse_double(v), "delta0"); }},
      {"appendix.gamma0_phase",
       [](RunConfig& c, std::string_view v) { c.gamma0_phase = parse_double(v); }},
      {"appendix.alpha",
       [](RunConfig& c, std::string_view v) { c.alpha = positive(parse_double(v), "alpha"); }},
      {"verify.suite",
       [](RunConfig& c, std::string_view v) {
         static const std::vector<std::string_view> suites{"all",        "reduced",  "analytic",
                                                           "integrator", "appendix", "spatial"};
         if (std::find(suites.begin(), suites.end(), v) == suites.end())
           throw std::invalid_argument("unknown suite '" + std::string(v) + "'");
         c.verify_suite = std::string(v);
       }},
      {"output.directory",
       [](RunConfig& c, std::string_view v) {
         if (v.empty()) throw std::invalid_argument("empty directory");
         c.output_dir = std::string(v);
       }},
      {"output.formats",
       [](RunConfig& c, std::string_view v) {
         c.write_csv = c.write_json = c.write_svg = false;
         for (auto f : split(v, ',')) {
           if (f == "csv") c.write_csv = true;
           else if (f == "json") c.write_json = true;
           else if (f == "svg") c.write_svg = true;
           else if (!f.empty())
             throw std::invalid_argument("unknown format '" + std::string(f) +
                                         "' (csv, json, svg)");
         }
       }},
  };
  return table;
}

}  // namespace

std::string_view to_string(Mode m) noexcept {
  switch (m) {
    case Mode::analytic: return "analytic";
    case Mode::nonlinear: return "nonlinear";
    case Mode::linearized: return "linearized";
    case Mode::reduced: return "reduced";
    case Mode::spatial: return "spatial";
    case Mode::appendix_a: return "appendix_a";
    case Mode::appendix_b: return "appendix_b";
    case Mode::verify: return "verify";
  }
  return "unknown";
}

std::string HamiltonianSource::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::random: os << "random(" << dim << ", " << seed << ")"; break;
    case Kind::diagonal:
      os << "diag(";
      for (std::size_t i = 0; i < energies.size(); ++i) os << (i ? ", " : "") << energies[i];
      os << ")";
      break;
    case Kind::file: os << path.string(); break;
  }
  return os.str();
}

void RunConfig::validate() const {
  if (n_samples < 2) throw ConfigError("time.samples: need at least 2 samples");
  if (!(t_end > t_start)) throw ConfigError("time.end: must be greater than time.start");
  if (A.has_value() != B.has_value())
    throw ConfigError("solution.A / solution.B: give both or neither");
  if (A && A->size() != B->size())
    throw ConfigError("solution.A / solution.B: lengths differ");
  if (mode == Mode::spatial) {
    if (!(x_max > x_min)) throw ConfigError("spatial.x_max: must be greater than spatial.x_min");
    if (n_points < 8 || (n_points & (n_points - 1)) != 0)
      throw ConfigError("spatial.points: must be a power of two >= 8");
    if (modes.size() < 2) throw ConfigError("spatial.modes: need at least two modes");
    if (A && A->size() != static_cast<Eigen::Index>(modes.size()))
      throw ConfigError("solution.A: length must match spatial.modes");
  }
  try {
    integrator.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("integrator: ") + e.what());
  }
}

void set_key(RunConfig& config, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  try {
    if (key.starts_with("check.")) {
      const auto name = key.substr(6);
      const auto& names = check_names();
      if (std::find(names.begin(), names.end(), name) == names.end())
        throw std::invalid_argument("unknown check '" + std::string(name) + "'");
      config.checks[std::string(name)] = positive(parse_double(value), "check tolerance");
      return;
    }
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown key '" + std::string(key) + "'");
    it->second(config, value);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("key '" + std::string(key) + "': " + e.what());
  }
}

RunConfig parse_config(std::string_view text, std::string_view source_name) {
  RunConfig config;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? end : end - start);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError(std::string(source_name) + ":" + std::to_string(line_no) +
                          ": expected 'key = value'");
      try {
        set_key(config, line.substr(0, eq), line.substr(eq + 1));
      } catch (const ConfigError& e) {
        throw ConfigError(std::string(source_name) + ":" + std::to_string(line_no) + ": " +
                          e.what());
      }
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  RunConfig config = parse_config(buf.str(), path.string());
  // Relative Hamiltonian paths resolve against the config file's directory.
  if (config.hamiltonian.kind == HamiltonianSource::Kind::file &&
      config.hamiltonian.path.is_relative())
    config.hamiltonian.path = path.parent_path() / config.hamiltonian.path;
  return config;
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("--set " + std::string(assignment) + ": expected key=value");
  try {
    set_key(config, assignment.substr(0, eq), assignment.substr(eq + 1));
  } catch (const ConfigError& e) {
    throw ConfigError("--set " + std::string(assignment) + ": " + e.what());
  }
}

std::vector<std::string> known_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.emplace_back(k);
  for (auto name : check_names()) keys.push_back("check." + std::string(name));
  std::sort(keys.begin(), keys.end());
  return keys;
}

cplx parse_complex(std::string_view text) {
  try {
    return parse_complex_literal(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("bad complex literal '" + std::string(text) + "': " + e.what());
  }
}

}  // namespace nlqm::cli
