#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirdiff/averaging.hpp"
#include "dirdiff/grid.hpp"
#include "dirdiff/perturb.hpp"
#include "dirdiff/random.hpp"

namespace dirdiff {

enum class MeasureMethod { grid_count, monte_carlo };

inline const char* to_string(MeasureMethod m) { return m == MeasureMethod::grid_count ? "grid_count" : "monte_carlo"; }

/// Estimated Lebesgue measure with a method tag and error bound: cell-boundary
/// slack for grid counts, a 99% confidence half-width for Monte Carlo.
struct MeasureEstimate {
  double value = 0.0;
  MeasureMethod method = MeasureMethod::grid_count;
  double error_bound = 0.0;
  std::int64_t samples_or_cells = 0;
};

using Indicator = std::function<bool(const PointN&)>;

/// A measurable test set: membership, a bounding box and, optionally, a
/// signed Euclidean distance to its boundary (negative inside).
struct Region {
  Indicator contains;
  Box bounds;
  std::function<double(const PointN&)> signed_distance;

  static Region box(const Box& b) {
    auto sd = [b](const PointN& x) {
      const double out = b.distance_to(x);
      if (out > 0.0) return out;
      double depth = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < x.size(); ++i) depth = std::min({depth, x[i] - b.lo()[i], b.hi()[i] - x[i]});
      return -depth;
    };
    return {[b](const PointN& x) { return b.contains(x); }, b, sd};
  }

  static Region ball(const PointN& center, double radius) {
    PointN lo = center, hi = center;
    for (std::size_t i = 0; i < center.size(); ++i) {
      lo[i] -= radius;
      hi[i] += radius;
    }
    return {[=](const PointN& x) { return distance(x, center) <= radius; }, Box(lo, hi),
            [=](const PointN& x) { return distance(x, center) - radius; }};
  }
};

inline MeasureEstimate estimate_from_counts(const GridSpec& grid, std::int64_t inside, std::int64_t boundary) {
  const double cell = grid.cell_volume();
  return {static_cast<double>(inside) * cell, MeasureMethod::grid_count, static_cast<double>(boundary) * cell,
          grid.cell_count()};
}

/// Grid-count estimate of the measure of {indicator} within the grid window.
inline MeasureEstimate measure_set(const Indicator& indicator, const GridSpec& grid, const Parallel& par = {}) {
  auto counts = scan_levels(
      grid, {{0.5}}, [&](const PointN& x, std::span<double> out) { out[0] = indicator(x) ? 1.0 : 0.0; }, par);
  return estimate_from_counts(grid, counts[0].inside[0], counts[0].boundary[0]);
}

/// Monte Carlo estimate over a box with a 99% normal-approximation half-width.
inline MeasureEstimate measure_set_monte_carlo(const Indicator& indicator, const Box& box, std::int64_t samples,
                                               std::uint64_t seed) {
  if (samples <= 0) throw std::invalid_argument("measure_set_monte_carlo: samples must be positive");
  Rng rng(seed);
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < samples; ++i) hits += indicator(uniform_point(rng, box)) ? 1 : 0;
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  const double half_width = 2.5758293035489 * box.volume() * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return {p * box.volume(), MeasureMethod::monte_carlo, half_width, samples};
}

/// Membership of S_s^{-1}(Z) in A, with the iteration cut short once the
/// certified error ball lies on one side of the boundary.
inline bool preimage_in(const Region& a, const PerturbationMap& map, const PointN& z) {
  if (!a.signed_distance) return a.contains(invert(map, z));
  const Inverse inv = invert_until(map, z, [&](const PointN& x, double bound) {
    return std::abs(a.signed_distance(x)) > 2.0 * bound;
  });
  return a.contains(inv.point);
}

/// mu(S_s(A)) via the pullback Z in S_s(A) iff S_s^{-1}(Z) in A.
inline MeasureEstimate measure_image(const Region& a, const PerturbationMap& map, const GridSpec& grid,
                                     const Parallel& par = {}) {
  grid.validate();
  // S_s moves points by exactly |s|.
  if (!grid.box.contains(a.bounds.dilated(std::abs(map.shift())))) {
    throw std::domain_error("measure_image: grid box too small, the image S_s(A) escapes it");
  }
  return measure_set([&](const PointN& z) { return preimage_in(a, map, z); }, grid, par);
}

/// Bound factors (c, C) with c mu(S_s A) <= mu(A) <= C mu(S_s A), from
/// mu(B) <= w_n diam(B)^n and diam(cube) = sqrt(n) side.
struct DistortionFactors {
  double lower;
  double upper;
};

inline DistortionFactors distortion_factors(std::size_t n, double q) {
  const double nd = static_cast<double>(n);
  const double d = unit_ball_volume(n) * std::pow(nd, 0.5 * nd);
  return {1.0 / (d * std::pow(1.0 + q, nd)), d / std::pow(1.0 - q, nd)};
}

struct DistortionReport {
  MeasureEstimate set;
  MeasureEstimate image;
  DistortionFactors factors;
  /// Positive margins mean the inequality holds with room to spare once the
  /// estimates are widened by their error bounds.
  double lower_margin;
  double upper_margin;

  bool lower_holds() const { return lower_margin >= 0.0; }
  bool upper_holds() const { return upper_margin >= 0.0; }
  bool passed() const { return lower_holds() && upper_holds(); }
};

inline DistortionReport check_distortion(const Region& a, const PerturbationMap& map, const GridSpec& grid,
                                         const Parallel& par = {}) {
  DistortionReport r;
  r.image = measure_image(a, map, grid, par);
  r.set = measure_set(a.contains, grid, par);
  r.factors = distortion_factors(map.dimension(), map.contraction());
  const double image_lo = std::max(0.0, r.image.value - r.image.error_bound);
  const double image_hi = r.image.value + r.image.error_bound;
  r.lower_margin = (r.set.value + r.set.error_bound) - r.factors.lower * image_lo;
  r.upper_margin = r.factors.upper * image_hi - (r.set.value - r.set.error_bound);
  return r;
}

/// Checks that every point within `reach` of some support box lies in the
/// window, so a windowed level-set measure equals the full-space one.
inline void require_window_covers(const GridSpec& window, const Box& support, double reach) {
  const Box needed = support.dilated(reach);
  bool ok = window.box.contains(needed);
  if (ok && window.ball_radius) ok = needed.max_norm() <= *window.ball_radius;
  if (!ok) throw std::domain_error("level set may extend beyond the window; enlarge the window");
}

/// Measures of {X in window : M_*^s(F_i)(X) > lambda} for several functions
/// and thresholds in one pass; the inversion is shared across functions.
inline std::vector<LevelCounts> maximal_counts(std::span<const ScalarField> fs, const PerturbationMap& map,
                                               const std::vector<std::vector<double>>& thresholds,
                                               const GridSpec& window, const MaximalSpec& maximal,
                                               const QuadratureSpec& quad, const Parallel& par = {}) {
  maximal.validate();
  quad.validate();
  if (fs.size() != thresholds.size()) throw std::invalid_argument("maximal_counts: one threshold list per function");
  return scan_levels(
      window, thresholds,
      [&](const PointN& x, std::span<double> out) {
        bool reachable = false;
        for (const auto& f : fs) reachable = reachable || f.support_box().distance_to(x) < maximal.t_max;
        if (!reachable) {
          std::fill(out.begin(), out.end(), 0.0);
          return;
        }
        const PointN w = map.field()(invert(map, x));
        for (std::size_t i = 0; i < fs.size(); ++i) out[i] = maximal_along(fs[i], w, x, maximal, quad);
      },
      par);
}

inline std::vector<LevelCounts> level_set_counts(std::span<const ScalarField> fs, const PerturbationMap& map,
                                                 const std::vector<std::vector<double>>& lambdas,
                                                 const GridSpec& window, const MaximalSpec& maximal,
                                                 const QuadratureSpec& quad, const Parallel& par = {}) {
  for (const auto& row : lambdas) {
    for (double l : row) {
      if (!(l > 0.0)) throw std::invalid_argument("level_set_counts: lambda must be positive");
    }
  }
  return maximal_counts(fs, map, lambdas, window, maximal, quad, par);
}

inline std::vector<MeasureEstimate> level_set_measures(const ScalarField& f, const PerturbationMap& map,
                                                       const std::vector<double>& lambdas, const GridSpec& window,
                                                       const MaximalSpec& maximal, const QuadratureSpec& quad,
                                                       const Parallel& par = {}) {
  auto counts = level_set_counts(std::span<const ScalarField>(&f, 1), map, {lambdas}, window, maximal, quad, par);
  std::vector<MeasureEstimate> out;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    out.push_back(estimate_from_counts(window, counts[0].inside[k], counts[0].boundary[k]));
  }
  return out;
}

/// Grid estimate of mu{X in window : M_*^s(F)(X) > lambda}.
inline MeasureEstimate level_set_measure(const ScalarField& f, const PerturbationMap& map, double lambda,
                                         const GridSpec& window, const MaximalSpec& maximal,
                                         const QuadratureSpec& quad, const Parallel& par = {}) {
  return level_set_measures(f, map, {lambda}, window, maximal, quad, par).front();
}

}  // namespace dirdiff
