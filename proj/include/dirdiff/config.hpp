#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dirdiff/averaging.hpp"
#include "dirdiff/covering.hpp"
#include "dirdiff/descriptor.hpp"
#include "dirdiff/fields.hpp"
#include "dirdiff/perturb.hpp"

namespace dirdiff {

inline const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> c{"invert-check", "distortion", "norm-convergence",
                                          "weak-type",    "pointwise",  "continuity",
                                          "h-n-decay",    "c-alpha",    "covering-demo"};
  return c;
}

/// Settings for one CLI run. Keys are flat and dotted (see config_keys());
/// every field has a default except `command`.
struct RunConfig {
  std::string command;
  std::vector<Descriptor> fields{Descriptor::parse("shear:a=1")};
  std::vector<Descriptor> scalars{Descriptor::parse("bump:sigma=0.25")};
  /// Members of the unit-ball surrogate for h-n-decay and c-alpha; empty
  /// means catalog_scalar_fields(dimension).
  std::vector<Descriptor> catalog;
  int dimension = 2;
  double T = 0.5;
  int s_count = 17;
  int s_samples = 8;
  std::vector<double> s_values{-0.2, 0.0, 0.2};
  /// Window radius N: level sets live in |X| <= N.
  double grid_radius = 2.0;
  int grid_resolution = 512;
  int maximal_levels = 8;
  QuadratureSpec quad{};
  SolverSpec solver{};
  std::uint64_t seed = 1;
  std::string output_path = "dirdiff-report";
  std::string output_format = "both";
  std::vector<double> lambdas{0.1, 0.2, 0.4, 0.6, 0.8};
  /// Thresholds for the c-alpha inequality (only those above max(1, ||F||_1) count).
  std::vector<double> rate_lambdas{1.5, 2.0, 4.0, 8.0, 16.0};
  /// Level for the continuity runner; unset means half of sup |F|.
  std::optional<double> continuity_lambda;
  double p = 1.0;
  std::vector<double> t_values{0.2, 0.1, 0.05, 0.025, 0.0125};
  double error_floor = 0.05;
  std::vector<double> pointwise_t{0.01, 0.001};
  int points = 1000;
  int n_max = 64;
  std::vector<double> alphas{0.25, 0.45};
  std::vector<Interval> intervals{{0, 2}, {1, 3}, {2, 4}};
  double c = 3.9;
  std::vector<double> invert_q{0.0, 0.25, 0.5, 0.9};
  int rects = 20;
  unsigned jobs = 0;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class Int>
Int parse_integer(std::string_view text) {
  const std::string t = trim(text);
  Int value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw std::invalid_argument("not an integer: '" + t + "'");
  }
  return value;
}

inline std::vector<double> parse_reals(std::string_view text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& part : split(text, ',')) out.push_back(parse_real(part));
  return out;
}

inline std::string join_reals(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_real(v[i]);
  return out;
}

inline std::vector<Descriptor> parse_descriptors(std::string_view text) {
  std::vector<Descriptor> out;
  if (trim(text).empty()) return out;
  for (const auto& part : split(text, ';')) {
    if (part.empty()) throw std::invalid_argument("empty descriptor in list");
    out.push_back(Descriptor::parse(part));
  }
  return out;
}

inline std::string join_descriptors(const std::vector<Descriptor>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + v[i].to_string();
  return out;
}

/// "(0,2),(1,3)" -> intervals.
inline std::vector<Interval> parse_intervals(std::string_view text) {
  std::vector<Interval> out;
  std::string t = trim(text);
  std::size_t pos = 0;
  while (pos < t.size()) {
    if (t[pos] == ',' || t[pos] == ' ') {
      ++pos;
      continue;
    }
    if (t[pos] != '(') throw std::invalid_argument("intervals: expected '(' in '" + t + "'");
    const auto close = t.find(')', pos);
    if (close == std::string::npos) throw std::invalid_argument("intervals: missing ')' in '" + t + "'");
    const auto ends = parse_reals(std::string_view(t).substr(pos + 1, close - pos - 1));
    if (ends.size() != 2) throw std::invalid_argument("intervals: each interval needs two endpoints");
    out.push_back({ends[0], ends[1]});
    pos = close + 1;
  }
  return out;
}

inline std::string join_intervals(const std::vector<Interval>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += (i ? "," : "") + std::string("(") + format_real(v[i].lo) + "," + format_real(v[i].hi) + ")";
  }
  return out;
}

inline QuadratureRule parse_rule(std::string_view text) {
  const std::string t = trim(text);
  if (t == "midpoint") return QuadratureRule::midpoint_composite;
  if (t == "gauss_legendre") return QuadratureRule::gauss_legendre;
  throw std::invalid_argument("quad.rule must be midpoint or gauss_legendre, got '" + t + "'");
}

}  // namespace detail

/// One configuration key: its dotted name, a reader and a writer.
struct ConfigKey {
  std::string name;
  std::string help;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

inline const std::vector<ConfigKey>& config_keys() {
  using namespace detail;
  using RC = RunConfig;
  using SV = std::string_view;
  static const std::vector<ConfigKey> keys{
      {"command", "one of the runner names", [](RC& c, SV v) { c.command = trim(v); },
       [](const RC& c) { return c.command; }},
      {"field", "';'-separated vector field descriptors",
       [](RC& c, SV v) { c.fields = parse_descriptors(v); }, [](const RC& c) { return join_descriptors(c.fields); }},
      {"scalar", "';'-separated scalar field descriptors",
       [](RC& c, SV v) { c.scalars = parse_descriptors(v); },
       [](const RC& c) { return join_descriptors(c.scalars); }},
      {"catalog", "unit-ball surrogate for h-n-decay and c-alpha (empty: built-in catalog)",
       [](RC& c, SV v) { c.catalog = parse_descriptors(v); },
       [](const RC& c) { return join_descriptors(c.catalog); }},
      {"dimension", "ambient dimension n", [](RC& c, SV v) { c.dimension = parse_integer<int>(v); },
       [](const RC& c) { return std::to_string(c.dimension); }},
      {"T", "shift horizon; s ranges over [-T/2, T/2]", [](RC& c, SV v) { c.T = parse_real(v); },
       [](const RC& c) { return format_real(c.T); }},
      {"s.count", "midpoint s-grid size", [](RC& c, SV v) { c.s_count = parse_integer<int>(v); },
       [](const RC& c) { return std::to_string(c.s_count); }},
      {"s.samples", "random s values for pointwise", [](RC& c, SV v) { c.s_samples = parse_integer<int>(v); },
       [](const RC& c) { return std::to_string(c.s_samples); }},
      {"s.values", "fixed s values for h-n-decay and c-alpha",
       [](RC& c, SV v) { c.s_values = parse_reals(v); }, [](const RC& c) { return join_reals(c.s_values); }},
      {"grid.radius", "window radius N", [](RC& c, SV v) { c.grid_radius = parse_real(v); },
       [](const RC& c) { return format_real(c.grid_radius); }},
      {"grid.resolution", "cells per axis", [](RC& c, SV v) { c.grid_resolution = parse_integer<int>(v); },
       [](const RC& c) { return std::to_string(c.grid_resolution); }},
      {"maximal.levels", "dyadic levels J", [](RC& c, SV v) { c.maximal_levels = parse_integer<int>(v); },
       [](const RC& c) { return std::to_string(c.maximal_levels); }},
      {"quad.rule", "midpoint or gauss_legendre", [](RC& c, SV v) { c.quad.rule = parse_rule(v); },
       [](const RC& c) { return std::string(to_string(c.quad.rule)); }},
      {"quad.nodes", "nodes per unit segment length", [](RC& c, SV v) { c.quad.nodes = parse_integer<int>(v); },
       [](const RC& c) { return std::to_string(c.quad.nodes); }},
      {"solver.tolerance", "certified inversion tolerance",
       [](RC& c, SV v) { c.solver.tolerance = parse_real(v); },
       [](const RC& c) { return format_real(c.solver.tolerance); }},
      {"solver.max_iterations", "iteration cap",
       [](RC& c, SV v) { c.solver.max_iterations = parse_integer<int>(v); },
       [](const RC& c) { return std::to_string(c.solver.max_iterations); }},
      {"seed", "64-bit seed", [](RC& c, SV v) { c.seed = parse_integer<std::uint64_t>(v); },
       [](const RC& c) { return std::to_string(c.seed); }},
      {"output.path", "report path without extension", [](RC& c, SV v) { c.output_path = trim(v); },
       [](const RC& c) { return c.output_path; }},
      {"output.format", "json, csv or both", [](RC& c, SV v) { c.output_format = trim(v); },
       [](const RC& c) { return c.output_format; }},
      {"lambda", "thresholds for weak-type", [](RC& c, SV v) { c.lambdas = parse_reals(v); },
       [](const RC& c) { return join_reals(c.lambdas); }},
      {"rate.lambda", "thresholds for c-alpha", [](RC& c, SV v) { c.rate_lambdas = parse_reals(v); },
       [](const RC& c) { return join_reals(c.rate_lambdas); }},
      {"continuity.lambda", "level for continuity (empty: half of sup |F|)",
       [](RC& c, SV v) {
         const std::string t = trim(v);
         c.continuity_lambda = t.empty() ? std::nullopt : std::optional<double>(parse_real(t));
       },
       [](const RC& c) { return c.continuity_lambda ? format_real(*c.continuity_lambda) : std::string(); }},
      {"p", "exponent for norm-convergence", [](RC& c, SV v) { c.p = parse_real(v); },
       [](const RC& c) { return format_real(c.p); }},
      {"t", "decreasing t values for norm-convergence", [](RC& c, SV v) { c.t_values = parse_reals(v); },
       [](const RC& c) { return join_reals(c.t_values); }},
      {"error_floor", "final norm error allowed, relative to ||F||_p",
       [](RC& c, SV v) { c.error_floor = parse_real(v); }, [](const RC& c) { return format_real(c.error_floor); }},
      {"pointwise.t", "t values for pointwise (finest is used)",
       [](RC& c, SV v) { c.pointwise_t = parse_reals(v); }, [](const RC& c) { return join_reals(c.pointwise_t); }},
      {"points", "sample points for pointwise and invert-check",
       [](RC& c, SV v) { c.points = parse_integer<int>(v); }, [](const RC& c) { return std::to_string(c.points); }},
      {"n.max", "largest n for h-n-decay and c-alpha", [](RC& c, SV v) { c.n_max = parse_integer<int>(v); },
       [](const RC& c) { return std::to_string(c.n_max); }},
      {"alpha", "exponents in (0, 1/2)", [](RC& c, SV v) { c.alphas = parse_reals(v); },
       [](const RC& c) { return join_reals(c.alphas); }},
      {"intervals", "covering-demo input, e.g. (0,2),(1,3)",
       [](RC& c, SV v) { c.intervals = parse_intervals(v); },
       [](const RC& c) { return join_intervals(c.intervals); }},
      {"c", "covering-demo threshold, below m(U)", [](RC& c, SV v) { c.c = parse_real(v); },
       [](const RC& c) { return format_real(c.c); }},
      {"invert.q", "contraction factors for invert-check", [](RC& c, SV v) { c.invert_q = parse_reals(v); },
       [](const RC& c) { return join_reals(c.invert_q); }},
      {"rects", "random rectangles for distortion", [](RC& c, SV v) { c.rects = parse_integer<int>(v); },
       [](const RC& c) { return std::to_string(c.rects); }},
      {"jobs", "worker threads, 0 = available parallelism",
       [](RC& c, SV v) { c.jobs = parse_integer<unsigned>(v); }, [](const RC& c) { return std::to_string(c.jobs); }},
  };
  return keys;
}

inline const ConfigKey& find_key(std::string_view name) {
  for (const auto& k : config_keys()) {
    if (k.name == name) return k;
  }
  throw std::invalid_argument("unknown config key '" + std::string(name) + "'");
}

/// Environment variable consulted for a key: DIRDIFF_ + upper-cased key with
/// '.' spelled "__" (maximal.levels -> DIRDIFF_MAXIMAL__LEVELS).
inline std::string env_name(std::string_view key) {
  std::string out = "DIRDIFF_";
  for (char ch : key) {
    if (ch == '.') {
      out += "__";
    } else {
      out += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    }
  }
  return out;
}

inline void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  const ConfigKey& k = find_key(detail::trim(key));
  try {
    k.set(c, value);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("config key '" + k.name + "': " + e.what());
  }
}

/// Applies "key=value" lines; '#' starts a comment line.
inline void apply_text(RunConfig& c, std::string_view text, std::string_view origin = "config") {
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(std::string(origin) + ":" + std::to_string(number) + ": expected key=value");
    }
    apply_setting(c, t.substr(0, eq), t.substr(eq + 1));
  }
}

inline std::vector<UnitVectorField> resolve_fields(const RunConfig& c) {
  std::vector<UnitVectorField> out;
  for (const auto& d : c.fields) out.push_back(make_vector_field(d, static_cast<std::size_t>(c.dimension)));
  return out;
}

inline std::vector<ScalarField> resolve_scalars(const std::vector<Descriptor>& ds, int dimension) {
  std::vector<ScalarField> out;
  for (const auto& d : ds) out.push_back(make_scalar_field(d, static_cast<std::size_t>(dimension)));
  return out;
}

inline std::vector<ScalarField> resolve_catalog(const RunConfig& c) {
  if (c.catalog.empty()) return catalog_scalar_fields(static_cast<std::size_t>(c.dimension));
  return resolve_scalars(c.catalog, c.dimension);
}

/// Checks every invariant; messages name the violated one.
inline void validate(const RunConfig& c) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("invalid config: " + what); };
  if (c.command.empty()) fail("missing required key 'command'");
  if (std::find(known_commands().begin(), known_commands().end(), c.command) == known_commands().end()) {
    fail("unknown command '" + c.command + "'");
  }
  if (c.dimension < 1 || c.dimension > static_cast<int>(kMaxDimension)) {
    fail("dimension must lie in [1, " + std::to_string(kMaxDimension) + "]");
  }
  if (c.fields.empty()) fail("field list must not be empty");
  if (c.scalars.empty()) fail("scalar list must not be empty");
  if (!(c.T > 0.0) || !std::isfinite(c.T)) fail("T must be positive and finite");
  const auto fields = resolve_fields(c);
  resolve_scalars(c.scalars, c.dimension);
  resolve_catalog(c);
  for (const auto& v : fields) {
    if (c.T * v.lipschitz_k() > kMaxContraction) {
      fail("contraction invariant T*K <= " + format_short(kMaxContraction) + " violated: T*K = " +
           format_short(c.T * v.lipschitz_k()) + " for field " + v.descriptor().to_string());
    }
  }
  if (c.s_count < 3) fail("s.count must be >= 3");
  if (c.s_samples < 1) fail("s.samples must be >= 1");
  for (double s : c.s_values) {
    if (!(std::abs(s) <= 0.5 * c.T)) fail("s.values must satisfy |s| <= T/2");
  }
  if (!(c.grid_radius > 0.0) || !std::isfinite(c.grid_radius)) fail("grid.radius must be positive");
  if (c.grid_resolution < 16) fail("grid.resolution must be >= 16");
  if (c.maximal_levels < 1) fail("maximal.levels must be >= 1");
  try {
    c.quad.validate();
    c.solver.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (c.output_path.empty()) fail("output.path must not be empty");
  if (c.output_format != "json" && c.output_format != "csv" && c.output_format != "both") {
    fail("output.format must be json, csv or both");
  }
  for (double l : c.lambdas) {
    if (!(l > 0.0)) fail("lambda values must be positive");
  }
  for (double l : c.rate_lambdas) {
    if (!(l > 0.0)) fail("rate.lambda values must be positive");
  }
  if (c.continuity_lambda && !(*c.continuity_lambda > 0.0)) fail("continuity.lambda must be positive");
  if (!(c.p >= 1.0) || !std::isfinite(c.p)) fail("p must be finite and >= 1");
  if (c.t_values.empty()) fail("t must not be empty");
  for (std::size_t i = 0; i < c.t_values.size(); ++i) {
    if (!(c.t_values[i] > 0.0)) fail("t values must be positive");
    if (i && !(c.t_values[i] < c.t_values[i - 1])) fail("t values must be strictly decreasing");
  }
  if (!(c.error_floor > 0.0)) fail("error_floor must be positive");
  if (c.pointwise_t.empty()) fail("pointwise.t must not be empty");
  for (double t : c.pointwise_t) {
    if (!(t > 0.0)) fail("pointwise.t values must be positive");
  }
  if (c.points < 1) fail("points must be >= 1");
  if (c.n_max < 2) fail("n.max must be >= 2");
  for (double a : c.alphas) {
    if (!(a > 0.0 && a < 0.5)) fail("alpha values must lie in (0, 1/2)");
  }
  try {
    IntervalCollection{c.intervals};
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (!(c.c > 0.0) || !std::isfinite(c.c)) fail("c must be positive");
  for (double q : c.invert_q) {
    if (!(q >= 0.0 && q <= kMaxContraction)) fail("invert.q values must lie in [0, 0.95]");
  }
  if (c.rects < 1) fail("rects must be >= 1");
}

/// Canonical text: one key=value line per key, in table order.
inline std::string serialize(const RunConfig& c) {
  std::string out;
  for (const auto& k : config_keys()) out += k.name + "=" + k.get(c) + "\n";
  return out;
}

/// Flat key -> value map, for embedding in JSON reports.
inline std::map<std::string, std::string> config_map(const RunConfig& c) {
  std::map<std::string, std::string> out;
  for (const auto& k : config_keys()) out[k.name] = k.get(c);
  return out;
}

struct ConfigSources {
  /// Contents of the config file, if any.
  std::optional<std::string> file_text;
  std::string file_name = "config";
  /// Lookup for environment overrides; defaults to std::getenv.
  std::function<std::optional<std::string>(const std::string&)> env;
  /// --set KEY=VALUE pairs, applied last.
  std::vector<std::string> overrides;
};

inline std::optional<std::string> process_env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  return v ? std::optional<std::string>(v) : std::nullopt;
}

/// Defaults, then the file, then DIRDIFF_* variables, then --set pairs.
inline RunConfig parse_config(const ConfigSources& src) {
  RunConfig c;
  if (src.file_text) apply_text(c, *src.file_text, src.file_name);
  const auto& env = src.env ? src.env : std::function(process_env);
  for (const auto& k : config_keys()) {
    if (auto v = env(env_name(k.name))) apply_setting(c, k.name, *v);
  }
  for (const auto& kv : src.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects KEY=VALUE, got '" + kv + "'");
    apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  validate(c);
  return c;
}

inline RunConfig parse_config_text(std::string_view text) {
  ConfigSources src;
  src.file_text = std::string(text);
  src.env = [](const std::string&) { return std::optional<std::string>(); };
  return parse_config(src);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dirdiff
