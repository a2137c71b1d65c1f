#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "dirdiff/descriptor.hpp"
#include "dirdiff/point.hpp"
#include "dirdiff/random.hpp"

namespace dirdiff {

// ---------------------------------------------------------------------------
// Unit vector fields
// ---------------------------------------------------------------------------

/// A unit vector field X -> v(X) on R^n with a declared Lipschitz constant K.
///
/// Catalog families are built from a phase function so that K is known in
/// closed form; arbitrary fields must declare K themselves (see
/// estimate_lipschitz for a sampling sanity check).
class UnitVectorField {
 public:
  using Eval = std::function<PointN(const PointN&)>;

  UnitVectorField(std::size_t dimension, Eval eval, double lipschitz_k, Descriptor descriptor)
      : dimension_(dimension), eval_(std::move(eval)), lipschitz_k_(lipschitz_k),
        descriptor_(std::move(descriptor)) {
    if (dimension == 0 || dimension > kMaxDimension) {
      throw std::invalid_argument("UnitVectorField: dimension must be in [1, " +
                                  std::to_string(kMaxDimension) + "]");
    }
    if (!(lipschitz_k >= 0.0) || !std::isfinite(lipschitz_k)) {
      throw std::invalid_argument("UnitVectorField: Lipschitz constant must be finite and nonnegative");
    }
    if (!eval_) throw std::invalid_argument("UnitVectorField: empty evaluator");
  }

  PointN operator()(const PointN& x) const { return eval_(x); }

  std::size_t dimension() const noexcept { return dimension_; }
  double lipschitz_k() const noexcept { return lipschitz_k_; }
  const Descriptor& descriptor() const noexcept { return descriptor_; }

 private:
  std::size_t dimension_;
  Eval eval_;
  double lipschitz_k_;
  Descriptor descriptor_;
};

/// Unit field v = cos(phi) e1 + sin(phi) e2 built from a scalar phase.
/// In R^1 only constant phases make sense; the result is then +-1.
inline UnitVectorField make_phase_field(std::size_t dimension, std::function<double(const PointN&)> phase,
                                        double phase_lipschitz, Descriptor descriptor = {"custom", {}}) {
  if (dimension == 0) throw std::invalid_argument("make_phase_field: dimension must be positive");
  if (dimension == 1) {
    if (phase_lipschitz != 0.0) {
      throw std::invalid_argument("make_phase_field: a unit field on R^1 must be constant (phase_lipschitz = 0)");
    }
    const double sign = std::cos(phase(PointN{0.0})) >= 0.0 ? 1.0 : -1.0;
    return UnitVectorField(1, [sign](const PointN&) { return PointN{sign}; }, 0.0, std::move(descriptor));
  }
  auto eval = [dimension, phase = std::move(phase)](const PointN& x) {
    const double phi = phase(x);
    PointN v(dimension);
    v[0] = std::cos(phi);
    v[1] = std::sin(phi);
    return v;
  };
  return UnitVectorField(dimension, std::move(eval), phase_lipschitz, std::move(descriptor));
}

/// v == (cos theta, sin theta, 0, ...); K = 0.
inline UnitVectorField constant_field(std::size_t dimension, double theta = 0.0) {
  return make_phase_field(dimension, [theta](const PointN&) { return theta; }, 0.0,
                          {"constant", {{"theta", theta}}});
}

/// Phase a * x1; K = |a|.
inline UnitVectorField shear_field(std::size_t dimension, double a) {
  if (dimension < 2) throw std::invalid_argument("shear_field: needs dimension >= 2");
  return make_phase_field(dimension, [a](const PointN& x) { return a * x[0]; }, std::abs(a),
                          {"shear", {{"a", a}}});
}

/// Phase a * sin(b x1 + c x2); K = |a| sqrt(b^2 + c^2).
inline UnitVectorField sinusoidal_field(std::size_t dimension, double a, double b, double c) {
  if (dimension < 2) throw std::invalid_argument("sinusoidal_field: needs dimension >= 2");
  return make_phase_field(dimension, [a, b, c](const PointN& x) { return a * std::sin(b * x[0] + c * x[1]); },
                          std::abs(a) * std::hypot(b, c), {"sinusoidal", {{"a", a}, {"b", b}, {"c", c}}});
}

/// Rebuilds a catalog field from its descriptor.
inline UnitVectorField make_vector_field(const Descriptor& d, std::size_t dimension) {
  auto check_keys = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : d.params) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) throw std::invalid_argument("unknown parameter '" + k + "' for vector field family '" + d.family + "'");
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite parameter '" + k + "'");
    }
  };
  if (d.family == "constant") {
    check_keys({"theta"});
    return constant_field(dimension, d.get_or("theta", 0.0));
  }
  if (d.family == "shear") {
    check_keys({"a"});
    return shear_field(dimension, d.get("a"));
  }
  if (d.family == "sinusoidal") {
    check_keys({"a", "b", "c"});
    return sinusoidal_field(dimension, d.get("a"), d.get("b"), d.get("c"));
  }
  throw std::invalid_argument("unknown vector field family '" + d.family + "'");
}

/// Constant, shear (a = 1) and sinusoidal (a = 0.5, b = c = 1) fields.
inline std::vector<UnitVectorField> catalog_vector_fields(std::size_t dimension) {
  return {constant_field(dimension), shear_field(dimension, 1.0), sinusoidal_field(dimension, 0.5, 1.0, 1.0)};
}

/// How pairs are drawn when estimating a Lipschitz constant.
struct PairSampler {
  Box box;
  std::size_t pairs = 100000;
  /// When set, the second point is X + d with |d| <= max_separation (clipped
  /// to the box); otherwise both points are independent uniform draws.
  std::optional<double> max_separation;
};

/// Empirical lower bound on K: max over sampled pairs of |v(X)-v(Y)| / |X-Y|.
/// Coincident pairs are skipped.
template <class Field>
double estimate_lipschitz(const Field& field, const PairSampler& sampler, std::uint64_t seed) {
  Rng rng(seed);
  double best = 0.0;
  const std::size_t n = sampler.box.dimension();
  for (std::size_t i = 0; i < sampler.pairs; ++i) {
    const PointN x = uniform_point(rng, sampler.box);
    PointN y(n);
    if (sampler.max_separation) {
      PointN d(n);
      for (std::size_t k = 0; k < n; ++k) d[k] = uniform(rng, -1.0, 1.0);
      const double len = norm(d);
      const double r = uniform(rng, 0.0, *sampler.max_separation);
      y = len > 0.0 ? axpy(x, r / len, d) : x;
      for (std::size_t k = 0; k < n; ++k) y[k] = std::clamp(y[k], sampler.box.lo()[k], sampler.box.hi()[k]);
    } else {
      y = uniform_point(rng, sampler.box);
    }
    const double dxy = distance(x, y);
    if (dxy == 0.0) continue;
    best = std::max(best, distance(field(x), field(y)) / dxy);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Scalar test functions
// ---------------------------------------------------------------------------

enum class Regularity { continuous_compact_support, indicator, truncated_singularity, smooth };

inline const char* to_string(Regularity r) {
  switch (r) {
    case Regularity::continuous_compact_support: return "continuous_compact_support";
    case Regularity::indicator: return "indicator";
    case Regularity::truncated_singularity: return "truncated_singularity";
    case Regularity::smooth: return "smooth";
  }
  return "?";
}

/// Known analytic facts about a scalar field. All optional; the catalog fills
/// in what it can derive in closed form.
struct ScalarFacts {
  /// p -> ||F||_p for finite p; nullopt when F is not in L^p (or unknown).
  std::function<std::optional<double>(double)> lp_norm;
  std::optional<double> sup_abs;
  /// Lipschitz constant away from the truncation jump.
  std::optional<double> lipschitz;
  /// Height of the jump introduced by truncating to the support.
  double truncation_jump = 0.0;
  /// Exponent gamma of a truncated singularity |X - X0|^-gamma.
  std::optional<double> singularity_exponent;
};

/// A test function F on R^n, identically zero outside its support box.
class ScalarField {
 public:
  using Eval = std::function<double(const PointN&)>;

  ScalarField(std::size_t dimension, Eval eval, Regularity regularity, Box support, Descriptor descriptor,
              ScalarFacts facts = {})
      : dimension_(dimension), eval_(std::move(eval)), regularity_(regularity), support_(std::move(support)),
        descriptor_(std::move(descriptor)), facts_(std::move(facts)) {
    if (dimension == 0 || dimension > kMaxDimension) throw std::invalid_argument("ScalarField: bad dimension");
    if (support_.dimension() != dimension) throw std::invalid_argument("ScalarField: support box dimension mismatch");
    if (!eval_) throw std::invalid_argument("ScalarField: empty evaluator");
  }

  /// F(x); exactly 0 outside the support box.
  double operator()(const PointN& x) const { return support_.contains(x) ? eval_(x) : 0.0; }

  std::size_t dimension() const noexcept { return dimension_; }
  Regularity regularity() const noexcept { return regularity_; }
  const Box& support_box() const noexcept { return support_; }
  const Descriptor& descriptor() const noexcept { return descriptor_; }
  const ScalarFacts& facts() const noexcept { return facts_; }

  std::optional<double> lp_norm(double p) const {
    if (!facts_.lp_norm) return std::nullopt;
    return facts_.lp_norm(p);
  }
  std::optional<double> l1_norm() const { return lp_norm(1.0); }
  std::optional<double> sup_abs() const { return facts_.sup_abs; }

  /// Declared modulus of continuity omega(delta) = L delta + jump, when F is
  /// continuous up to its truncation jump.
  std::optional<double> modulus(double delta) const {
    if (!facts_.lipschitz) return std::nullopt;
    return *facts_.lipschitz * delta + facts_.truncation_jump;
  }

 private:
  std::size_t dimension_;
  Eval eval_;
  Regularity regularity_;
  Box support_;
  Descriptor descriptor_;
  ScalarFacts facts_;
};

/// Radial distance from the origin; hypot in 2D for accuracy.
inline double radius_of(const PointN& x) { return norm(x); }

/// exp(-|X|^2 / sigma^2) cut at |X| = 4 sigma, scaled to unit L1 mass.
inline ScalarField gaussian_bump(std::size_t n, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_bump: sigma must be positive");
  const double cut = 4.0 * sigma;
  const double half_n = 0.5 * static_cast<double>(n);
  // Mass of the truncated Gaussian: (sqrt(pi) sigma)^n P(n/2, 16).
  const double mass = std::pow(std::sqrt(std::numbers::pi) * sigma, static_cast<double>(n)) *
                      boost::math::gamma_p(half_n, 16.0);
  const double peak = 1.0 / mass;
  ScalarFacts facts;
  facts.sup_abs = peak;
  facts.lipschitz = peak * std::sqrt(2.0) / sigma * std::exp(-0.5);
  facts.truncation_jump = peak * std::exp(-16.0);
  facts.lp_norm = [=](double p) -> std::optional<double> {
    if (!(p >= 1.0) || !std::isfinite(p)) return std::nullopt;
    // int (peak e^{-r^2/s^2})^p over |X| <= 4 sigma.
    const double m = std::pow(peak, p) * std::pow(std::numbers::pi * sigma * sigma / p, half_n) *
                     boost::math::gamma_p(half_n, 16.0 * p);
    return std::pow(m, 1.0 / p);
  };
  auto eval = [=](const PointN& x) {
    const double r2 = dot(x, x);
    return r2 <= cut * cut ? peak * std::exp(-r2 / (sigma * sigma)) : 0.0;
  };
  return {n, eval, Regularity::smooth, Box::cube(n, -cut, cut), {"bump", {{"sigma", sigma}}}, facts};
}

/// Indicator of the cube [lo, hi]^n scaled to unit L1 mass.
inline ScalarField box_indicator(std::size_t n, double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("box_indicator: need lo < hi");
  const double volume = std::pow(hi - lo, static_cast<double>(n));
  const double value = 1.0 / volume;
  ScalarFacts facts;
  facts.sup_abs = value;
  facts.lp_norm = [=](double p) -> std::optional<double> {
    if (!(p >= 1.0) || !std::isfinite(p)) return std::nullopt;
    return value * std::pow(volume, 1.0 / p);
  };
  return {n, [value](const PointN&) { return value; }, Regularity::indicator, Box::cube(n, lo, hi),
          {"box", {{"lo", lo}, {"hi", hi}}}, facts};
}

/// c |X|^-gamma 1{|X| <= R} with c chosen for unit L1 mass; needs gamma < n.
/// At the singular point the value is capped at c (1e-12 R)^-gamma.
inline ScalarField truncated_singularity(std::size_t n, double gamma, double radius) {
  const double nd = static_cast<double>(n);
  if (!(gamma > 0.0 && gamma < nd)) throw std::invalid_argument("truncated_singularity: need 0 < gamma < n");
  if (!(radius > 0.0)) throw std::invalid_argument("truncated_singularity: radius must be positive");
  const double sphere = nd * unit_ball_volume(n);
  const double c = (nd - gamma) / (sphere * std::pow(radius, nd - gamma));
  const double r_floor = 1e-12 * radius;
  ScalarFacts facts;
  facts.singularity_exponent = gamma;
  facts.lp_norm = [=](double p) -> std::optional<double> {
    if (!(p >= 1.0) || !std::isfinite(p) || gamma * p >= nd) return std::nullopt;
    const double m = std::pow(c, p) * sphere * std::pow(radius, nd - gamma * p) / (nd - gamma * p);
    return std::pow(m, 1.0 / p);
  };
  auto eval = [=](const PointN& x) {
    const double r = radius_of(x);
    if (r > radius) return 0.0;
    const double rr = std::max(r, r_floor);
    return gamma == 1.0 ? c / rr : c * std::pow(rr, -gamma);
  };
  return {n, eval, Regularity::truncated_singularity, Box::cube(n, -radius, radius),
          {"singularity", {{"gamma", gamma}, {"radius", radius}}}, facts};
}

/// Radial tent c max(0, 1 - |X|/R) with unit L1 mass.
inline ScalarField tent(std::size_t n, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("tent: radius must be positive");
  const double nd = static_cast<double>(n);
  const double c = (nd + 1.0) / (unit_ball_volume(n) * std::pow(radius, nd));
  ScalarFacts facts;
  facts.sup_abs = c;
  facts.lipschitz = c / radius;
  facts.lp_norm = [=](double p) -> std::optional<double> {
    if (!(p >= 1.0) || !std::isfinite(p)) return std::nullopt;
    // c^p n w_n R^n B(n, p + 1)
    const double beta = std::exp(std::lgamma(nd) + std::lgamma(p + 1.0) - std::lgamma(nd + p + 1.0));
    const double m = std::pow(c, p) * nd * unit_ball_volume(n) * std::pow(radius, nd) * beta;
    return std::pow(m, 1.0 / p);
  };
  auto eval = [=](const PointN& x) { return c * std::max(0.0, 1.0 - radius_of(x) / radius); };
  return {n, eval, Regularity::continuous_compact_support, Box::cube(n, -radius, radius),
          {"tent", {{"radius", radius}}}, facts};
}

/// F == 0.
inline ScalarField zero_field(std::size_t n) {
  ScalarFacts facts;
  facts.sup_abs = 0.0;
  facts.lipschitz = 0.0;
  facts.lp_norm = [](double p) -> std::optional<double> {
    if (!(p >= 1.0) || !std::isfinite(p)) return std::nullopt;
    return 0.0;
  };
  return {n, [](const PointN&) { return 0.0; }, Regularity::continuous_compact_support, Box::cube(n, 0.0, 0.0),
          {"zero", {}}, facts};
}

/// Sampled modulus of continuity: max |F(X) - F(Y)| over random pairs with
/// |X - Y| <= delta drawn around the support. A lower estimate of the true one.
inline double sampled_modulus(const ScalarField& f, double delta, std::size_t pairs, std::uint64_t seed) {
  Rng rng(seed);
  const Box region = f.support_box().dilated(delta);
  const std::size_t n = f.dimension();
  double worst = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const PointN x = uniform_point(rng, region);
    PointN d(n);
    for (std::size_t k = 0; k < n; ++k) d[k] = uniform(rng, -1.0, 1.0);
    const double len = norm(d);
    if (len == 0.0) continue;
    const PointN y = axpy(x, uniform(rng, 0.0, delta) / len, d);
    worst = std::max(worst, std::abs(f(x) - f(y)));
  }
  return worst;
}

/// Declared modulus when known, otherwise a sampled estimate.
inline double modulus_of_continuity(const ScalarField& f, double delta, std::uint64_t seed = 7) {
  if (auto m = f.modulus(delta)) return *m;
  return sampled_modulus(f, delta, 200000, seed);
}

inline ScalarField make_scalar_field(const Descriptor& d, std::size_t n) {
  auto check_keys = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : d.params) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) throw std::invalid_argument("unknown parameter '" + k + "' for scalar family '" + d.family + "'");
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite parameter '" + k + "'");
    }
  };
  if (d.family == "bump") {
    check_keys({"sigma"});
    return gaussian_bump(n, d.get_or("sigma", 0.25));
  }
  if (d.family == "box") {
    check_keys({"lo", "hi"});
    return box_indicator(n, d.get_or("lo", 0.0), d.get_or("hi", 1.0));
  }
  if (d.family == "singularity") {
    check_keys({"gamma", "radius"});
    return truncated_singularity(n, d.get_or("gamma", 1.0), d.get_or("radius", 1.0));
  }
  if (d.family == "tent") {
    check_keys({"radius"});
    return tent(n, d.get_or("radius", 0.5));
  }
  if (d.family == "zero") {
    check_keys({});
    return zero_field(n);
  }
  throw std::invalid_argument("unknown scalar field family '" + d.family + "'");
}

/// Finite stand-in for a dense family of the L1 unit ball: a smooth bump, a
/// cube indicator, two truncated singularities and a tent, each with
/// ||F||_1 = 1. The stronger singularity (gamma = 3n/4) keeps the large-n
/// level sets above grid resolution.
inline std::vector<ScalarField> catalog_scalar_fields(std::size_t n) {
  if (n == 0) throw std::invalid_argument("catalog_scalar_fields: dimension must be positive");
  const double gamma = n >= 2 ? 1.0 : 0.5;
  return {gaussian_bump(n, 0.25), box_indicator(n, 0.0, 1.0), truncated_singularity(n, gamma, 1.0),
          truncated_singularity(n, 0.75 * static_cast<double>(n), 1.0), tent(n, 0.5)};
}

}  // namespace dirdiff
