#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dirdiff/averaging.hpp"
#include "dirdiff/covering.hpp"
#include "dirdiff/fields.hpp"
#include "dirdiff/grid.hpp"
#include "dirdiff/measure.hpp"
#include "dirdiff/parallel.hpp"
#include "dirdiff/perturb.hpp"
#include "dirdiff/random.hpp"
#include "dirdiff/report.hpp"

namespace dirdiff {

// ---------------------------------------------------------------------------
// Shared setup
// ---------------------------------------------------------------------------

/// Midpoints of a uniform partition of [-T/2, T/2].
struct SGrid {
  double T = 0.5;
  int count = 17;

  void validate() const {
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("SGrid: T must be positive");
    if (count < 3) throw std::invalid_argument("SGrid: count must be >= 3");
  }

  std::vector<double> values() const {
    validate();
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = -0.5 * T + (i + 0.5) * T / count;
    return v;
  }

  double spacing() const { return T / count; }
};

/// Everything a level-set runner needs besides the functions: the horizon T
/// (the maximal operator runs over 0 < t <= T/2), the window, the dyadic depth
/// and the numerical settings.
struct LevelSetSetup {
  double T = 0.5;
  GridSpec window = GridSpec::ball_window(2, 2.0, 512);
  int levels = 8;
  QuadratureSpec quad{};
  SolverSpec solver{};

  MaximalSpec maximal() const { return {0.5 * T, levels}; }
};

/// Rejects T <= 0 and T K above the contraction limit.
inline void validate_horizon(double T, double K) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("T must be positive and finite");
  if (T * K > kMaxContraction) {
    throw std::invalid_argument("contraction invariant violated: T*K = " + format_short(T * K) + " exceeds " +
                                format_short(kMaxContraction));
  }
}

inline nlohmann::json to_json(const GridSpec& g) {
  nlohmann::json j{{"lo", std::vector<double>(g.box.lo().begin(), g.box.lo().end())},
                   {"hi", std::vector<double>(g.box.hi().begin(), g.box.hi().end())},
                   {"resolution", g.resolution}};
  if (g.ball_radius) j["ball_radius"] = *g.ball_radius;
  return j;
}

inline nlohmann::json to_json(const QuadratureSpec& q) { return {{"rule", to_string(q.rule)}, {"nodes", q.nodes}}; }
inline nlohmann::json to_json(const SolverSpec& s) {
  return {{"tolerance", s.tolerance}, {"max_iterations", s.max_iterations}};
}
inline nlohmann::json to_json(const LevelSetSetup& s) {
  return {{"T", s.T}, {"window", to_json(s.window)}, {"levels", s.levels}, {"t_max", s.maximal().t_max},
          {"quad", to_json(s.quad)}, {"solver", to_json(s.solver)}};
}

inline std::string describe(const UnitVectorField& v) { return v.descriptor().to_string(); }
inline std::string describe(const ScalarField& f) { return f.descriptor().to_string(); }

/// ||F||_1: declared when known, otherwise integrated on the grid.
inline double l1_norm_of(const ScalarField& f, const GridSpec& grid, const Parallel& par) {
  if (auto l1 = f.l1_norm()) return *l1;
  auto totals = sum_over_centers(
      grid, 1, [&](const PointN& x, std::span<double> out) { out[0] = std::abs(f(x)); }, par);
  return totals.sum[0] * grid.cell_volume();
}

/// Bound on ||M_t F||_p^p / ||F||_p^p: the average over |s| <= t of the
/// image-measure factor w_n n^{n/2} / (1 - |s| K)^n (2 pi / (1 - tK) in 2D).
inline double lp_bound_factor(std::size_t n, double t, double K) {
  const double nd = static_cast<double>(n);
  const double d = unit_ball_volume(n) * std::pow(nd, 0.5 * nd);
  const double q = t * K;
  if (q == 0.0) return d;
  if (n == 1) return d * -std::log(1.0 - q) / q;
  return d * (std::pow(1.0 - q, 1.0 - nd) - 1.0) / (q * (nd - 1.0));
}

/// Final weak-type constant D^2 ((1 + TK)/(1 - TK))^n with D = w_n n^{n/2};
/// equals 4 pi^2 (1 + TK)^2 / (1 - TK)^2 in the plane.
inline double weak_type_constant(std::size_t n, double T, double K) {
  const double nd = static_cast<double>(n);
  const double d = unit_ball_volume(n) * std::pow(nd, 0.5 * nd);
  return d * d * std::pow((1.0 + T * K) / (1.0 - T * K), nd);
}

/// The constant before the last change of field, D / (1 - TK)^n
/// (2 pi / (1 - TK)^2 in the plane).
inline double weak_type_intermediate_constant(std::size_t n, double T, double K) {
  const double nd = static_cast<double>(n);
  const double d = unit_ball_volume(n) * std::pow(nd, 0.5 * nd);
  return d / std::pow(1.0 - T * K, nd);
}

// ---------------------------------------------------------------------------
// Norm convergence of M_t F
// ---------------------------------------------------------------------------

struct NormConvergenceSetup {
  double p = 1.0;
  std::vector<double> t_values{0.2, 0.1, 0.05, 0.025, 0.0125};
  GridSpec grid{Box::cube(2, -1.5, 1.5), 512, std::nullopt};
  QuadratureSpec quad{};
  /// The error at the smallest t must not exceed error_floor * ||F||_p.
  double error_floor = 0.05;
};

inline ExperimentReport run_norm_convergence(const ScalarField& f, const UnitVectorField& v,
                                             const NormConvergenceSetup& setup, const Parallel& par = {}) {
  if (!std::isfinite(setup.p)) throw std::invalid_argument("norm convergence holds only for finite p; p = inf rejected");
  if (!(setup.p >= 1.0)) throw std::invalid_argument("p must be >= 1");
  if (setup.t_values.empty()) throw std::invalid_argument("t_values must not be empty");
  for (std::size_t i = 0; i < setup.t_values.size(); ++i) {
    if (!(setup.t_values[i] > 0.0)) throw std::invalid_argument("t values must be positive");
    if (i && !(setup.t_values[i] < setup.t_values[i - 1])) throw std::invalid_argument("t values must decrease");
  }
  setup.grid.validate();
  setup.quad.validate();
  require_window_covers(setup.grid, f.support_box(), setup.t_values.front());

  const double p = setup.p;
  const std::size_t nt = setup.t_values.size();
  auto power = [p](double x) { return p == 1.0 ? std::abs(x) : std::pow(std::abs(x), p); };
  // Channels: |F|^p, then per t: |M_t F - F|^p, |M_t F|^p, |M_t F - F|.
  auto totals = sum_over_centers(
      setup.grid, 1 + 3 * nt,
      [&](const PointN& x, std::span<double> out) {
        const double fx = f(x);
        out[0] = power(fx);
        const bool reachable = f.support_box().distance_to(x) < setup.t_values.front();
        const PointN d = reachable ? v(x) : PointN(x.size());
        for (std::size_t i = 0; i < nt; ++i) {
          const double m = reachable ? line_average(f, d, x, setup.t_values[i], setup.quad) : 0.0;
          out[1 + 3 * i] = power(m - fx);
          out[2 + 3 * i] = power(m);
          out[3 + 3 * i] = std::abs(m - fx);
        }
      },
      par);
  const double cell = setup.grid.cell_volume();
  const double grid_fp = totals.sum[0] * cell;
  const auto declared = f.lp_norm(p);
  const double fp_p = declared ? std::pow(*declared, p) : grid_fp;
  const double fp = std::pow(fp_p, 1.0 / p);
  const double slack = std::abs(grid_fp - fp_p) + 1e-3 * fp_p;

  ExperimentReport r;
  r.name = "norm-convergence";
  r.inputs = {{"field", describe(v)}, {"scalar", describe(f)}, {"p", p}, {"t_values", setup.t_values},
              {"grid", to_json(setup.grid)}, {"quad", to_json(setup.quad)}, {"error_floor", setup.error_floor},
              {"norm_F_p", fp}};
  r.columns = {"field", "scalar", "p", "t", "error_p", "norm_p", "error_sup", "lp_bound"};
  std::vector<double> errors(nt), sups(nt);
  double bound_margin = std::numeric_limits<double>::infinity();
  const std::size_t n = f.dimension();
  for (std::size_t i = 0; i < nt; ++i) {
    const double t = setup.t_values[i];
    errors[i] = std::pow(totals.sum[1 + 3 * i] * cell, 1.0 / p);
    const double mp_p = totals.sum[2 + 3 * i] * cell;
    sups[i] = std::max(0.0, totals.max[3 + 3 * i]);
    const double bound = lp_bound_factor(n, t, v.lipschitz_k()) * fp_p;
    bound_margin = std::min(bound_margin, bound + slack - mp_p);
    r.add_row({describe(v), describe(f), p, t, errors[i], std::pow(mp_p, 1.0 / p), sups[i], bound});
  }

  bool monotone = true;
  for (std::size_t i = 1; i < nt; ++i) monotone = monotone && errors[i] <= errors[i - 1];
  const double floor = setup.error_floor * fp;
  r.check("errors decrease to below the floor", monotone && errors.back() <= floor, floor - errors.back(),
          monotone ? "" : "not monotone");

  const double lip = f.facts().lipschitz.value_or(std::numeric_limits<double>::quiet_NaN());
  if (f.facts().lipschitz) {
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nt; ++i) margin = std::min(margin, 1.1 * *f.modulus(setup.t_values[i]) - sups[i]);
    r.check("pointwise error <= 1.1 Lip(F) t", margin >= 0.0, margin, "Lip(F) = " + format_short(lip));
  }
  r.check("||M_t F||_p^p <= (2pi/(1-tK)) ||F||_p^p + slack", bound_margin >= 0.0, bound_margin);
  return r;
}

// ---------------------------------------------------------------------------
// s-averaged weak-type inequality
// ---------------------------------------------------------------------------

inline ExperimentReport run_weak_type(const ScalarField& f, const UnitVectorField& v, const LevelSetSetup& setup,
                                      const std::vector<double>& lambdas, const SGrid& s_grid,
                                      const Parallel& par = {}) {
  const double K = v.lipschitz_k();
  validate_horizon(setup.T, K);
  if (std::abs(s_grid.T - setup.T) > 0.0) throw std::invalid_argument("s-grid T must match the setup T");
  for (double l : lambdas) {
    if (!(l > 0.0)) throw std::invalid_argument("lambda must be positive");
  }
  const MaximalSpec maximal = setup.maximal();
  require_window_covers(setup.window, f.support_box(), maximal.t_max);
  const double l1 = l1_norm_of(f, setup.window, par);
  const std::size_t n = f.dimension();
  const double constant = weak_type_constant(n, setup.T, K);
  const double intermediate = weak_type_intermediate_constant(n, setup.T, K);

  const auto ss = s_grid.values();
  std::vector<std::vector<MeasureEstimate>> per_s;
  for (double s : ss) {
    const PerturbationMap map(v, s, setup.solver);
    per_s.push_back(level_set_measures(f, map, lambdas, setup.window, maximal, setup.quad, par));
  }

  ExperimentReport r;
  r.name = "weak-type";
  r.inputs = {{"field", describe(v)}, {"scalar", describe(f)}, {"setup", to_json(setup)}, {"lambdas", lambdas},
              {"s_count", s_grid.count}, {"norm_F_1", l1}, {"constant", constant},
              {"intermediate_constant", intermediate}};
  r.provenance = {"dyadic_t_grid", "midpoint_s_integral"};
  r.columns = {"field", "scalar", "lambda", "s", "measure", "error_bound", "lhs", "rhs", "observed_constant"};
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    double lhs = 0.0, slack = 0.0;
    for (const auto& row : per_s) {
      lhs += row[k].value;
      slack += row[k].error_bound;
    }
    lhs /= static_cast<double>(ss.size());
    slack /= static_cast<double>(ss.size());
    const double rhs = constant * l1 / lambdas[k];
    const double observed = l1 > 0.0 ? lhs * lambdas[k] / l1 : 0.0;
    for (std::size_t i = 0; i < ss.size(); ++i) {
      r.add_row({describe(v), describe(f), lambdas[k], ss[i], per_s[i][k].value, per_s[i][k].error_bound, lhs, rhs,
                 observed});
    }
    r.check("s-averaged level set <= C ||F||_1 / lambda at lambda = " + format_short(lambdas[k]),
            lhs <= rhs + slack, rhs + slack - lhs,
            "observed constant " + format_short(observed) + " vs " + format_short(constant) + " (intermediate " +
                format_short(intermediate) + ")");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Pointwise convergence probe
// ---------------------------------------------------------------------------

struct PointwiseSetup {
  double T = 0.5;
  std::vector<double> t_values{0.01, 0.001};
  QuadratureSpec quad{};
  SolverSpec solver{};
  /// Error level counted as a failure for discontinuous F.
  double jump_threshold = 0.01;
  /// Allowed failure fraction for discontinuous F.
  double jump_fraction = 0.05;
};

inline bool is_continuous(Regularity r) {
  return r == Regularity::smooth || r == Regularity::continuous_compact_support;
}

inline ExperimentReport run_pointwise(const ScalarField& f, const UnitVectorField& v, const PointwiseSetup& setup,
                                      const std::vector<double>& s_samples, const std::vector<PointN>& points) {
  validate_horizon(setup.T, v.lipschitz_k());
  for (double s : s_samples) {
    if (std::abs(s) > 0.5 * setup.T) throw std::invalid_argument("pointwise: |s| must be <= T/2");
  }
  if (setup.t_values.empty()) throw std::invalid_argument("pointwise: t_values must not be empty");
  const double t = *std::min_element(setup.t_values.begin(), setup.t_values.end());
  const bool continuous = is_continuous(f.regularity());
  const double eps = continuous ? 10.0 * modulus_of_continuity(f, t) : setup.jump_threshold;

  ExperimentReport r;
  r.name = "pointwise";
  r.inputs = {{"field", describe(v)}, {"scalar", describe(f)}, {"T", setup.T}, {"t", t}, {"s_samples", s_samples},
              {"points", points.size()}, {"quad", to_json(setup.quad)}, {"solver", to_json(setup.solver)},
              {"epsilon", eps}};
  r.provenance = {"sampled_s"};
  r.columns = {"field", "scalar", "s", "point_index", "point", "error_pushforward", "error_shifted"};
  std::int64_t fail_push = 0, fail_shift = 0, total = 0;
  double worst = 0.0;
  for (double s : s_samples) {
    const PerturbationMap map(v, s, setup.solver);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const PointN& x = points[i];
      const double e_push = std::abs(m_t_pushforward(f, map, x, t, setup.quad) - f(x));
      const double e_shift = std::abs(m_t_shifted(f, v, x, s, t, setup.quad) - f(apply(map, x)));
      fail_push += e_push > eps ? 1 : 0;
      fail_shift += e_shift > eps ? 1 : 0;
      worst = std::max({worst, e_push, e_shift});
      ++total;
      std::string label;
      for (std::size_t k = 0; k < x.size(); ++k) label += (k ? ";" : "") + format_short(x[k]);
      r.add_row({describe(v), describe(f), s, static_cast<std::int64_t>(i), label, e_push, e_shift});
    }
  }
  const double frac_push = total ? static_cast<double>(fail_push) / static_cast<double>(total) : 0.0;
  const double frac_shift = total ? static_cast<double>(fail_shift) / static_cast<double>(total) : 0.0;
  const double allowed = continuous ? 0.0 : setup.jump_fraction;
  r.check("pushforward averages converge: failure fraction <= " + format_short(allowed), frac_push <= allowed,
          allowed - frac_push, "epsilon " + format_short(eps));
  r.check("shifted averages converge: failure fraction <= " + format_short(allowed), frac_shift <= allowed,
          allowed - frac_shift, "epsilon " + format_short(eps) + ", worst error " + format_short(worst));
  return r;
}

// ---------------------------------------------------------------------------
// Continuity in s of the level-set measure
// ---------------------------------------------------------------------------

/// Uniform displacement constant (KT/2)/(1 - TK/2): for |s1|, |s2| <= T/2 and
/// |beta| <= T/2 the sample points X + beta v(S_s^{-1} X) move by at most
/// C |s1 - s2|.
inline double continuity_constant(double T, double K) { return 0.5 * K * T / (1.0 - 0.5 * T * K); }

inline ExperimentReport run_continuity_in_s(const ScalarField& f, const UnitVectorField& v,
                                            const LevelSetSetup& setup, double lambda, const SGrid& s_grid,
                                            const Parallel& par = {}) {
  if (!is_continuous(f.regularity())) throw std::invalid_argument("continuity runner needs a continuous F");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  const double K = v.lipschitz_k();
  validate_horizon(setup.T, K);
  const MaximalSpec maximal = setup.maximal();
  const double c = continuity_constant(setup.T, K);
  // Node displacement bound, including both inversion errors.
  const double delta = c * s_grid.spacing() + setup.T * K * setup.solver.tolerance;
  const double eps = modulus_of_continuity(f, delta) + 1e-12;
  const auto ss = s_grid.values();
  const double cell = setup.window.cell_volume();

  struct Sample {
    double measure, error, band;
  };
  std::vector<Sample> samples;
  for (double s : ss) {
    const PerturbationMap map(v, s, setup.solver);
    auto counts = maximal_counts(std::span<const ScalarField>(&f, 1), map, {{lambda, lambda - eps, lambda + eps}},
                                 setup.window, maximal, setup.quad, par);
    const auto& cnt = counts[0];
    samples.push_back({static_cast<double>(cnt.inside[0]) * cell, static_cast<double>(cnt.boundary[0]) * cell,
                       static_cast<double>(cnt.inside[1] - cnt.inside[2]) * cell});
  }

  ExperimentReport r;
  r.name = "continuity";
  r.inputs = {{"field", describe(v)}, {"scalar", describe(f)}, {"setup", to_json(setup)}, {"lambda", lambda},
              {"s_count", s_grid.count}, {"C", c}, {"epsilon", eps}};
  r.provenance = {"dyadic_t_grid"};
  r.columns = {"field", "scalar", "s", "measure", "error_bound", "band_measure", "jump_to_next", "bound_to_next"};
  double margin = std::numeric_limits<double>::infinity();
  double max_jump = 0.0;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    double jump = 0.0, bound = 0.0;
    if (i + 1 < ss.size()) {
      jump = std::abs(samples[i + 1].measure - samples[i].measure);
      bound = samples[i].band + samples[i].error + samples[i + 1].error;
      margin = std::min(margin, bound - jump);
      max_jump = std::max(max_jump, jump);
    }
    r.add_row({describe(v), describe(f), ss[i], samples[i].measure, samples[i].error, samples[i].band, jump, bound});
  }
  r.check("adjacent jumps <= level-band measure + grid slack", margin >= 0.0, margin,
          "max jump " + format_short(max_jump) + ", epsilon " + format_short(eps));
  return r;
}

// ---------------------------------------------------------------------------
// Decay of H_n(s) and the rate constant C_alpha(s)
// ---------------------------------------------------------------------------

inline void require_unit_ball(std::span<const ScalarField> catalog, const GridSpec& grid, const Parallel& par) {
  if (catalog.empty()) throw std::invalid_argument("catalog must not be empty");
  for (const auto& f : catalog) {
    if (l1_norm_of(f, grid, par) > 1.0 + 1e-12) {
      throw std::invalid_argument("catalog member " + describe(f) + " has ||F||_1 > 1");
    }
  }
}

/// Per s: H_n(s) = max over the catalog of mu{X in window : M_*^s F > n}.
struct DecayTable {
  std::vector<double> s_values;
  std::vector<double> n_values;
  /// h[s][n], the (center-count) catalog maximum.
  std::vector<std::vector<double>> h;
  /// Error bound of the maximizing member.
  std::vector<std::vector<double>> h_error;
  /// Per s, per member, per extra threshold: estimates for extra lambdas.
  std::vector<std::vector<std::vector<MeasureEstimate>>> extra;
};

inline DecayTable decay_table(std::span<const ScalarField> catalog, const UnitVectorField& v,
                              const LevelSetSetup& setup, const std::vector<double>& s_values,
                              const std::vector<double>& n_values, const std::vector<double>& extra_lambdas,
                              const Parallel& par) {
  validate_horizon(setup.T, v.lipschitz_k());
  for (double s : s_values) {
    if (std::abs(s) > 0.5 * setup.T) throw std::invalid_argument("|s| must be <= T/2");
  }
  std::vector<double> thresholds = n_values;
  thresholds.insert(thresholds.end(), extra_lambdas.begin(), extra_lambdas.end());
  const std::vector<std::vector<double>> per_member(catalog.size(), thresholds);
  DecayTable table{s_values, n_values, {}, {}, {}};
  for (double s : s_values) {
    const PerturbationMap map(v, s, setup.solver);
    auto counts = level_set_counts(catalog, map, per_member, setup.window, setup.maximal(), setup.quad, par);
    std::vector<double> h(n_values.size(), 0.0), herr(n_values.size(), 0.0);
    for (std::size_t k = 0; k < n_values.size(); ++k) {
      for (const auto& c : counts) {
        const auto est = estimate_from_counts(setup.window, c.inside[k], c.boundary[k]);
        if (est.value > h[k] || (est.value == h[k] && est.error_bound > herr[k])) {
          h[k] = est.value;
          herr[k] = est.error_bound;
        }
      }
    }
    std::vector<std::vector<MeasureEstimate>> extra(catalog.size());
    for (std::size_t m = 0; m < catalog.size(); ++m) {
      for (std::size_t e = 0; e < extra_lambdas.size(); ++e) {
        const std::size_t k = n_values.size() + e;
        extra[m].push_back(estimate_from_counts(setup.window, counts[m].inside[k], counts[m].boundary[k]));
      }
    }
    table.h.push_back(std::move(h));
    table.h_error.push_back(std::move(herr));
    table.extra.push_back(std::move(extra));
  }
  return table;
}

/// Least-squares slope of y against log(x).
inline double log_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t m = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double lx = std::log(x[i]);
    sx += lx;
    sy += y[i];
    sxx += lx * lx;
    sxy += lx * y[i];
  }
  const double den = static_cast<double>(m) * sxx - sx * sx;
  return den > 0.0 ? (static_cast<double>(m) * sxy - sx * sy) / den : 0.0;
}

inline ExperimentReport run_h_n_decay(std::span<const ScalarField> catalog, const UnitVectorField& v,
                                      const LevelSetSetup& setup, const std::vector<double>& s_values,
                                      const std::vector<double>& n_values, const std::vector<double>& alphas,
                                      const Parallel& par = {}) {
  require_unit_ball(catalog, setup.window, par);
  if (n_values.size() < 2) throw std::invalid_argument("need at least two n values");
  for (std::size_t i = 1; i < n_values.size(); ++i) {
    if (!(n_values[i] > n_values[i - 1])) throw std::invalid_argument("n values must increase");
  }
  const DecayTable table = decay_table(catalog, v, setup, s_values, n_values, {}, par);

  ExperimentReport r;
  r.name = "h-n-decay";
  std::vector<std::string> members;
  for (const auto& f : catalog) members.push_back(describe(f));
  r.inputs = {{"field", describe(v)}, {"catalog", members}, {"setup", to_json(setup)}, {"s_values", s_values},
              {"n_values", n_values}, {"alphas", alphas}};
  r.provenance = {"catalog_surrogate", "dyadic_t_grid"};
  r.columns = {"field", "s", "n", "H", "error_bound"};
  for (double a : alphas) r.columns.push_back("n^" + format_short(a) + "*H");

  const std::size_t top = n_values.size() / 2;
  for (std::size_t si = 0; si < s_values.size(); ++si) {
    const auto& h = table.h[si];
    for (std::size_t k = 0; k < n_values.size(); ++k) {
      std::vector<Cell> row{describe(v), s_values[si], n_values[k], h[k], table.h_error[si][k]};
      for (double a : alphas) row.emplace_back(std::pow(n_values[k], a) * h[k]);
      r.add_row(std::move(row));
    }
    double worst_rise = 0.0;
    for (std::size_t k = 1; k < h.size(); ++k) worst_rise = std::max(worst_rise, h[k] - h[k - 1]);
    r.check("H_n nonincreasing in n at s = " + format_short(s_values[si]), worst_rise == 0.0, 0.0 - worst_rise);
    for (double a : alphas) {
      std::vector<double> xs(n_values.begin() + static_cast<std::ptrdiff_t>(top), n_values.end());
      std::vector<double> ys;
      for (std::size_t k = top; k < n_values.size(); ++k) ys.push_back(std::pow(n_values[k], a) * h[k]);
      const bool empty = std::all_of(ys.begin(), ys.end(), [](double y) { return y == 0.0; });
      const double slope = log_slope(xs, ys);
      const double drop = ys.front() - ys.back();
      const std::string claim =
          "n^" + format_short(a) + " H_n decreasing over the top half at s = " + format_short(s_values[si]);
      if (empty) {
        r.check(claim, true, 0.0, "vacuous: level sets empty on the top half");
      } else {
        r.check(claim, drop > 0.0 && slope < 0.0, std::min(drop, -slope), "log-slope " + format_short(slope));
      }
    }
  }
  return r;
}

inline ExperimentReport run_c_alpha(std::span<const ScalarField> catalog, const UnitVectorField& v,
                                    const LevelSetSetup& setup, const std::vector<double>& s_values, double alpha,
                                    int n_max, const std::vector<double>& lambdas, const Parallel& par = {}) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("alpha must lie in (0, 1/2)");
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  require_unit_ball(catalog, setup.window, par);
  std::vector<double> n_values;
  for (int k = 1; k <= n_max; ++k) n_values.push_back(k);
  for (double l : lambdas) {
    if (!(l > 0.0)) throw std::invalid_argument("lambda must be positive");
  }
  const DecayTable table = decay_table(catalog, v, setup, s_values, n_values, lambdas, par);

  ExperimentReport r;
  r.name = "c-alpha";
  std::vector<std::string> members;
  for (const auto& f : catalog) members.push_back(describe(f));
  r.inputs = {{"field", describe(v)}, {"catalog", members}, {"setup", to_json(setup)}, {"s_values", s_values},
              {"alpha", alpha}, {"n_max", n_max}, {"lambdas", lambdas}};
  r.provenance = {"catalog_surrogate", "dyadic_t_grid", "finite_n_range"};
  r.columns = {"field", "scalar", "s", "lambda", "measure", "error_bound", "C_alpha", "rhs"};
  std::vector<double> norms;
  for (const auto& f : catalog) norms.push_back(l1_norm_of(f, setup.window, par));

  for (std::size_t si = 0; si < s_values.size(); ++si) {
    double c_alpha = 0.0;
    for (std::size_t k = 0; k < n_values.size(); ++k) {
      c_alpha = std::max(c_alpha, std::pow(n_values[k], alpha) * table.h[si][k]);
    }
    r.check("C_alpha finite at s = " + format_short(s_values[si]), std::isfinite(c_alpha), 0.0,
            "C_alpha = " + format_short(c_alpha));
    double margin = std::numeric_limits<double>::infinity();
    std::int64_t tested = 0;
    for (std::size_t m = 0; m < catalog.size(); ++m) {
      for (std::size_t e = 0; e < lambdas.size(); ++e) {
        const double lambda = lambdas[e];
        if (!(lambda > 1.0 && lambda > norms[m])) continue;
        const auto& est = table.extra[si][m][e];
        const double rhs = std::pow(2.0, alpha) * c_alpha * std::pow(norms[m] / lambda, alpha);
        margin = std::min(margin, rhs + est.error_bound - est.value);
        ++tested;
        r.add_row({describe(v), describe(catalog[m]), s_values[si], lambda, est.value, est.error_bound, c_alpha, rhs});
      }
    }
    r.check("level sets <= 2^alpha C_alpha (||F||_1/lambda)^alpha at s = " + format_short(s_values[si]),
            margin >= 0.0, tested ? margin : 0.0, std::to_string(tested) + " (F, lambda) pairs");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Perturbation and measure suites
// ---------------------------------------------------------------------------

/// Shift realizing contraction q for the field (any shift when K = 0).
inline double shift_for_contraction(const UnitVectorField& v, double q) {
  return v.lipschitz_k() > 0.0 ? q / v.lipschitz_k() : q;
}

/// Round-trip, bi-Lipschitz sandwich and iteration-count checks on random
/// points of [-2, 2]^n for each (field, q).
inline ExperimentReport run_invert_check(std::span<const UnitVectorField> fields, const std::vector<double>& qs,
                                         std::size_t points, const SolverSpec& solver, std::uint64_t seed) {
  ExperimentReport r;
  r.name = "invert-check";
  std::vector<std::string> names;
  for (const auto& v : fields) names.push_back(describe(v));
  r.inputs = {{"fields", names}, {"q_values", qs}, {"points", points}, {"solver", to_json(solver)}, {"seed", seed}};
  r.columns = {"field", "dimension", "q", "s", "points", "max_roundtrip_error", "max_iterations",
               "sandwich_violations"};
  double rt_margin = std::numeric_limits<double>::infinity();
  double iter_margin = std::numeric_limits<double>::infinity();
  std::int64_t violations = 0;
  std::uint64_t task = 0;
  for (const auto& v : fields) {
    const std::size_t n = v.dimension();
    const Box box = Box::cube(n, -2.0, 2.0);
    for (double q : qs) {
      const double s = shift_for_contraction(v, q);
      const PerturbationMap map(v, s, solver);
      Rng rng(mix_seed(seed, task++));
      double worst = 0.0;
      int max_iter = 0;
      std::int64_t bad = 0;
      const double qq = map.contraction();
      for (std::size_t i = 0; i < points; ++i) {
        const PointN x = uniform_point(rng, box);
        const PointN y = uniform_point(rng, box);
        const PointN z = apply(map, x);
        const Inverse inv = invert_certified(map, z);
        worst = std::max(worst, distance(inv.point, x));
        max_iter = std::max(max_iter, inv.iterations);
        if (qq > 0.0 && inv.first_step > 0.0) {
          const double predicted =
              std::ceil(std::log(solver.tolerance * (1.0 - qq) / inv.first_step) / std::log(qq)) + 1.0;
          iter_margin = std::min(iter_margin, std::max(predicted, 1.0) - inv.iterations);
        }
        const double dxy = distance(x, y);
        const double dz = distance(z, apply(map, y));
        if (dz > (1.0 + qq) * dxy + 1e-12 || dz < (1.0 - qq) * dxy - 1e-12) ++bad;
      }
      violations += bad;
      rt_margin = std::min(rt_margin, 2.0 * solver.tolerance - worst);
      r.add_row({describe(v), static_cast<std::int64_t>(n), qq, s, static_cast<std::int64_t>(points), worst,
                 static_cast<std::int64_t>(max_iter), bad});
    }
  }
  r.check("round-trip error <= 2 tolerance", rt_margin >= 0.0, rt_margin);
  r.check("bi-Lipschitz sandwich (1 +- |s|K) holds", violations == 0,
          violations == 0 ? 0.0 : -static_cast<double>(violations));
  if (std::isfinite(iter_margin)) {
    r.check("iterations within the geometric-convergence bound", iter_margin >= 0.0, iter_margin);
  }
  return r;
}

/// Random axis-aligned rectangles in [-1, 1]^n, sides in [0.05, 1].
inline std::vector<Box> random_boxes(std::size_t n, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Box> boxes;
  for (std::size_t i = 0; i < count; ++i) {
    PointN lo(n), hi(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double side = uniform(rng, 0.05, 1.0);
      lo[k] = uniform(rng, -1.0, 1.0 - side);
      hi[k] = lo[k] + side;
    }
    boxes.emplace_back(lo, hi);
  }
  return boxes;
}

/// check_distortion over rectangles x fields x s in {+-T/4, +-0.45 T}, with
/// T capped at 0.95/K for each field.
inline ExperimentReport run_distortion(std::span<const UnitVectorField> fields, double T, std::size_t rectangles,
                                       int resolution, const SolverSpec& solver, std::uint64_t seed,
                                       const Parallel& par = {}) {
  ExperimentReport r;
  r.name = "distortion";
  std::vector<std::string> names;
  for (const auto& v : fields) names.push_back(describe(v));
  r.inputs = {{"fields", names}, {"T", T}, {"rectangles", rectangles}, {"resolution", resolution},
              {"solver", to_json(solver)}, {"seed", seed}};
  r.columns = {"field", "s", "rectangle", "mu_A", "mu_image", "error_A", "error_image", "lower_factor",
               "upper_factor", "lower_margin", "upper_margin"};
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& v : fields) {
    const double K = v.lipschitz_k();
    const double t_field = K > 0.0 ? std::min(T, kMaxContraction / K) : T;
    const auto boxes = random_boxes(v.dimension(), rectangles, seed);
    for (double s : {-0.25 * t_field, 0.25 * t_field, -0.45 * t_field, 0.45 * t_field}) {
      const PerturbationMap map(v, s, solver);
      for (std::size_t i = 0; i < boxes.size(); ++i) {
        const GridSpec grid{boxes[i].dilated(std::abs(s) + 0.05), resolution, std::nullopt};
        const auto d = check_distortion(Region::box(boxes[i]), map, grid, par);
        worst = std::min({worst, d.lower_margin, d.upper_margin});
        r.add_row({describe(v), s, static_cast<std::int64_t>(i), d.set.value, d.image.value, d.set.error_bound,
                   d.image.error_bound, d.factors.lower, d.factors.upper, d.lower_margin, d.upper_margin});
      }
    }
  }
  r.check("c mu(S_s A) <= mu(A) <= C mu(S_s A) for every rectangle", worst >= 0.0, worst);
  return r;
}

inline ExperimentReport run_covering_demo(const IntervalCollection& intervals, double c) {
  const auto chosen = greedy_cover_select(intervals, c);
  ExperimentReport r;
  r.name = "covering-demo";
  std::vector<std::vector<double>> input;
  for (const auto& i : intervals.intervals()) input.push_back({i.lo, i.hi});
  r.inputs = {{"intervals", input}, {"c", c}, {"union_measure", union_measure(intervals)}};
  r.columns = {"index", "lo", "hi", "length"};
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    r.add_row({static_cast<std::int64_t>(k), chosen[k].lo, chosen[k].hi, chosen[k].length()});
  }
  bool disjoint = true;
  for (std::size_t a = 0; a < chosen.size(); ++a) {
    for (std::size_t b = a + 1; b < chosen.size(); ++b) disjoint = disjoint && !chosen[a].intersects(chosen[b]);
  }
  const double total = total_length(chosen);
  r.check("selected intervals pairwise disjoint", disjoint, disjoint ? 0.0 : -1.0);
  r.check("total length > c/3", total > c / 3.0, total - c / 3.0);
  return r;
}

}  // namespace dirdiff
