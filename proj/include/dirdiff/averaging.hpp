#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirdiff/fields.hpp"
#include "dirdiff/perturb.hpp"
#include "dirdiff/point.hpp"

namespace dirdiff {

enum class QuadratureRule { midpoint_composite, gauss_legendre };

inline const char* to_string(QuadratureRule r) {
  return r == QuadratureRule::midpoint_composite ? "midpoint" : "gauss_legendre";
}

/// Discretization of the segment integral over beta in [-t, t].
///
/// `nodes` is a density: the segment of length 2t gets max(8, ceil(nodes 2t))
/// nodes. With the default of 128 and t_max = 1/4 this is the 64-node top
/// level, halving per dyadic level down to the floor of 8.
struct QuadratureSpec {
  QuadratureRule rule = QuadratureRule::midpoint_composite;
  int nodes = 128;

  void validate() const {
    if (nodes < 8) throw std::invalid_argument("QuadratureSpec: nodes must be >= 8");
  }

  int count(double t) const {
    const double wanted = std::ceil(static_cast<double>(nodes) * 2.0 * t);
    return static_cast<int>(std::clamp(wanted, 8.0, 1e8));
  }

  friend bool operator==(const QuadratureSpec&, const QuadratureSpec&) = default;
};

/// Dyadic truncation of sup over 0 < t <= t_max: t_j = t_max 2^-j, j = 0..levels.
struct MaximalSpec {
  double t_max = 0.25;
  int levels = 8;

  void validate() const {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("MaximalSpec: t_max must be positive");
    if (levels < 1) throw std::invalid_argument("MaximalSpec: levels must be >= 1");
  }

  std::vector<double> scales() const {
    std::vector<double> ts(static_cast<std::size_t>(levels) + 1);
    for (int j = 0; j <= levels; ++j) ts[static_cast<std::size_t>(j)] = std::ldexp(t_max, -j);
    return ts;
  }

  double finest() const { return std::ldexp(t_max, -levels); }

  friend bool operator==(const MaximalSpec&, const MaximalSpec&) = default;
};

/// Whether the integrand is F itself or |F| (the latter for all maximal and
/// weak-type estimates).
enum class Integrand { value, modulus };

namespace detail {

// 4-point Gauss-Legendre on [-1, 1].
inline constexpr std::array<double, 4> kGl4Nodes{-0.86113631159405257522, -0.33998104358485626480,
                                                 0.33998104358485626480, 0.86113631159405257522};
inline constexpr std::array<double, 4> kGl4Weights{0.34785484513745385737, 0.65214515486254614263,
                                                   0.65214515486254614263, 0.34785484513745385737};

}  // namespace detail

/// (1/2t) int_{-t}^{t} F(X + beta d) dbeta by the chosen rule.
///
/// The result is clamped to the range of the sampled values, which the exact
/// weighted mean always lies in; this makes positivity, constants and the sup
/// bound hold exactly in floating point.
inline double line_average(const ScalarField& f, const PointN& direction, const PointN& x, double t,
                           const QuadratureSpec& quad, Integrand integrand = Integrand::value) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("line_average: t must be positive, got " + format_real(t));
  if (std::abs(norm(direction) - 1.0) > 1e-9) throw std::invalid_argument("line_average: direction is not a unit vector");
  const bool take_abs = integrand == Integrand::modulus;
  auto sample = [&](double beta) {
    const double value = f(axpy(x, beta, direction));
    return take_abs ? std::abs(value) : value;
  };
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  const int m = quad.count(t);
  if (quad.rule == QuadratureRule::midpoint_composite) {
    const double h = 2.0 * t / m;
    for (int k = 0; k < m; ++k) {
      const double value = sample(-t + (k + 0.5) * h);
      sum += value;
      lo = std::min(lo, value);
      hi = std::max(hi, value);
    }
    sum /= m;
  } else {
    const int panels = (m + 3) / 4;
    const double h = 2.0 * t / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = -t + (p + 0.5) * h;
      for (std::size_t k = 0; k < 4; ++k) {
        const double value = sample(mid + 0.5 * h * detail::kGl4Nodes[k]);
        sum += 0.5 * detail::kGl4Weights[k] * value;
        lo = std::min(lo, value);
        hi = std::max(hi, value);
      }
    }
    sum /= panels;
  }
  return std::clamp(sum, lo, hi);
}

/// M_t(F)(X): average along v(X).
inline double m_t(const ScalarField& f, const UnitVectorField& v, const PointN& x, double t,
                  const QuadratureSpec& quad) {
  return line_average(f, v(x), x, t, quad);
}

/// (1/2t) int F(X + (s + beta) v(X)) dbeta.
inline double m_t_shifted(const ScalarField& f, const UnitVectorField& v, const PointN& x, double s, double t,
                          const QuadratureSpec& quad) {
  const PointN d = v(x);
  return line_average(f, d, axpy(x, s, d), t, quad);
}

/// M_t^s(F)(X): average along v(S_s^{-1}(X)).
inline double m_t_pushforward(const ScalarField& f, const PerturbationMap& map, const PointN& x, double t,
                              const QuadratureSpec& quad, Integrand integrand = Integrand::value) {
  return line_average(f, map.field()(invert(map, x)), x, t, quad, integrand);
}

/// Dyadic maximal average of |F| along a fixed direction. Levels whose
/// segment cannot reach the support contribute exactly 0 and are skipped.
inline double maximal_along(const ScalarField& f, const PointN& direction, const PointN& x, const MaximalSpec& spec,
                            const QuadratureSpec& quad) {
  const double gap = f.support_box().distance_to(x);
  double best = 0.0;
  double t = spec.t_max;
  for (int j = 0; j <= spec.levels; ++j, t *= 0.5) {
    if (gap >= t) break;
    best = std::max(best, line_average(f, direction, x, t, quad, Integrand::modulus));
  }
  return best;
}

/// M_*^s(F)(X) = max over the dyadic grid of M_t^s(|F|)(X).
inline double maximal(const ScalarField& f, const PerturbationMap& map, const PointN& x, const MaximalSpec& spec,
                      const QuadratureSpec& quad) {
  if (f.support_box().distance_to(x) >= spec.t_max) return 0.0;
  return maximal_along(f, map.field()(invert(map, x)), x, spec, quad);
}

}  // namespace dirdiff
