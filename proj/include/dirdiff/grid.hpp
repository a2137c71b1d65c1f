#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dirdiff/parallel.hpp"
#include "dirdiff/point.hpp"

namespace dirdiff {

/// Uniform cell grid over a box, optionally masked to the ball |X| <= radius.
struct GridSpec {
  Box box;
  int resolution = 512;
  /// When set, only points with |X| <= ball_radius belong to the window.
  std::optional<double> ball_radius;

  std::size_t dimension() const noexcept { return box.dimension(); }

  void validate() const {
    if (resolution < 16) throw std::invalid_argument("GridSpec: resolution must be >= 16");
    if (!box.nondegenerate()) throw std::invalid_argument("GridSpec: box must be nondegenerate");
    if (ball_radius && !(*ball_radius > 0.0)) throw std::invalid_argument("GridSpec: ball radius must be positive");
  }

  double cell_volume() const noexcept {
    return box.volume() / std::pow(static_cast<double>(resolution), static_cast<double>(dimension()));
  }

  std::int64_t cell_count() const noexcept {
    std::int64_t c = 1;
    for (std::size_t i = 0; i < dimension(); ++i) c *= resolution;
    return c;
  }

  bool in_window(const PointN& x) const noexcept { return !ball_radius || norm(x) <= *ball_radius; }

  /// The box circumscribing the ball |X| <= radius, with the ball mask on.
  static GridSpec ball_window(std::size_t n, double radius, int resolution) {
    return {Box::cube(n, -radius, radius), resolution, radius};
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Per-threshold cell tallies for one scalar channel sampled on a grid.
///
/// A cell is "inside" level k when its center value exceeds thresholds[k]; it
/// is "boundary" when its corners and center disagree about that.
struct LevelCounts {
  std::vector<double> thresholds;
  std::vector<std::int64_t> inside;
  std::vector<std::int64_t> boundary;
};

namespace detail {

/// Index geometry of the cell/corner lattice, sliced into slabs along axis 0.
struct Lattice {
  std::size_t n;
  std::int64_t res;
  std::int64_t corner_layer;  // (res + 1)^(n - 1)
  std::int64_t cell_layer;    // res^(n - 1)
  std::vector<std::int64_t> corner_offsets;  // 2^(n-1) offsets inside a corner layer
  PointN lo;
  PointN h;

  explicit Lattice(const GridSpec& g) : n(g.dimension()), res(g.resolution), lo(g.box.lo()), h(g.dimension()) {
    corner_layer = 1;
    cell_layer = 1;
    for (std::size_t a = 1; a < n; ++a) {
      corner_layer *= res + 1;
      cell_layer *= res;
    }
    for (std::size_t a = 0; a < n; ++a) h[a] = (g.box.hi()[a] - g.box.lo()[a]) / static_cast<double>(res);
    const std::size_t combos = std::size_t{1} << (n - 1);
    corner_offsets.resize(combos);
    for (std::size_t mask = 0; mask < combos; ++mask) {
      std::int64_t off = 0, stride = 1;
      for (std::size_t a = 1; a < n; ++a) {
        if (mask & (std::size_t{1} << (a - 1))) off += stride;
        stride *= res + 1;
      }
      corner_offsets[mask] = off;
    }
  }

  /// Point of the corner layer `slab` (axis-0 index) with in-layer index idx.
  PointN corner(std::int64_t slab, std::int64_t idx) const {
    PointN p(n);
    p[0] = lo[0] + static_cast<double>(slab) * h[0];
    for (std::size_t a = 1; a < n; ++a) {
      const std::int64_t k = idx % (res + 1);
      idx /= res + 1;
      p[a] = lo[a] + static_cast<double>(k) * h[a];
    }
    return p;
  }

  PointN center(std::int64_t slab, std::int64_t idx) const {
    PointN p(n);
    p[0] = lo[0] + (static_cast<double>(slab) + 0.5) * h[0];
    for (std::size_t a = 1; a < n; ++a) {
      const std::int64_t k = idx % res;
      idx /= res;
      p[a] = lo[a] + (static_cast<double>(k) + 0.5) * h[a];
    }
    return p;
  }

  /// Index of the lowest corner of cell idx within a corner layer.
  std::int64_t base_corner(std::int64_t idx) const {
    std::int64_t off = 0, stride = 1;
    for (std::size_t a = 1; a < n; ++a) {
      off += (idx % res) * stride;
      idx /= res;
      stride *= res + 1;
    }
    return off;
  }
};

}  // namespace detail

/// Samples `channels` scalar values at every cell center and corner of the
/// grid and tallies, per channel, how many cells lie above / straddle each
/// threshold. Points outside the ball mask read as -infinity without calling
/// the sampler. sample(point, span<double> out) must fill out[0..channels).
template <class Sampler>
std::vector<LevelCounts> scan_levels(const GridSpec& grid, std::vector<std::vector<double>> thresholds,
                                     Sampler&& sample, const Parallel& par = {}) {
  grid.validate();
  const std::size_t channels = thresholds.size();
  const detail::Lattice lat(grid);
  constexpr double kOutside = -std::numeric_limits<double>::infinity();

  // Sorted copies; differences are accumulated against sorted order.
  std::vector<std::vector<std::size_t>> order(channels);
  std::vector<std::vector<double>> sorted(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    order[c].resize(thresholds[c].size());
    for (std::size_t k = 0; k < order[c].size(); ++k) order[c][k] = k;
    std::stable_sort(order[c].begin(), order[c].end(),
                     [&](std::size_t a, std::size_t b) { return thresholds[c][a] < thresholds[c][b]; });
    for (std::size_t k : order[c]) sorted[c].push_back(thresholds[c][k]);
  }

  const std::size_t chunks = par.resolved();
  // diff[chunk][channel][k], length K + 1 each, for inside and boundary.
  std::vector<std::vector<std::vector<std::int64_t>>> inside_diff(chunks), boundary_diff(chunks);

  auto fill_layer = [&](std::vector<double>& out, std::int64_t size, auto&& point_of) {
    out.assign(static_cast<std::size_t>(size) * channels, 0.0);
    for (std::int64_t i = 0; i < size; ++i) {
      const PointN p = point_of(i);
      std::span<double> slot(out.data() + static_cast<std::size_t>(i) * channels, channels);
      if (!grid.in_window(p)) {
        std::fill(slot.begin(), slot.end(), kOutside);
      } else {
        sample(p, slot);
      }
    }
  };

  parallel_chunks(static_cast<std::size_t>(lat.res), chunks, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    auto& ins = inside_diff[chunk];
    auto& bnd = boundary_diff[chunk];
    ins.resize(channels);
    bnd.resize(channels);
    for (std::size_t c = 0; c < channels; ++c) {
      ins[c].assign(sorted[c].size() + 1, 0);
      bnd[c].assign(sorted[c].size() + 1, 0);
    }
    std::vector<double> lower, upper, centers;
    const auto slab0 = static_cast<std::int64_t>(begin);
    fill_layer(lower, lat.corner_layer, [&](std::int64_t i) { return lat.corner(slab0, i); });
    for (auto slab = static_cast<std::int64_t>(begin); slab < static_cast<std::int64_t>(end); ++slab) {
      fill_layer(upper, lat.corner_layer, [&](std::int64_t i) { return lat.corner(slab + 1, i); });
      fill_layer(centers, lat.cell_layer, [&](std::int64_t i) { return lat.center(slab, i); });
      for (std::int64_t cell = 0; cell < lat.cell_layer; ++cell) {
        const std::int64_t base = lat.base_corner(cell);
        for (std::size_t c = 0; c < channels; ++c) {
          const double mid = centers[static_cast<std::size_t>(cell) * channels + c];
          double lo = mid, hi = mid;
          for (std::int64_t off : lat.corner_offsets) {
            const auto idx = static_cast<std::size_t>(base + off) * channels + c;
            lo = std::min({lo, lower[idx], upper[idx]});
            hi = std::max({hi, lower[idx], upper[idx]});
          }
          const auto& th = sorted[c];
          // inside for thresholds < mid: sorted prefix [0, k_mid)
          const auto k_mid = static_cast<std::size_t>(std::lower_bound(th.begin(), th.end(), mid) - th.begin());
          ins[c][0] += 1;
          ins[c][k_mid] -= 1;
          // boundary for lo <= threshold < hi: [k_lo, k_hi)
          const auto k_lo = static_cast<std::size_t>(std::lower_bound(th.begin(), th.end(), lo) - th.begin());
          const auto k_hi = static_cast<std::size_t>(std::lower_bound(th.begin(), th.end(), hi) - th.begin());
          if (k_lo < k_hi) {
            bnd[c][k_lo] += 1;
            bnd[c][k_hi] -= 1;
          }
        }
      }
      std::swap(lower, upper);
    }
  });

  std::vector<LevelCounts> out(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    const std::size_t kk = sorted[c].size();
    std::vector<std::int64_t> ins(kk + 1, 0), bnd(kk + 1, 0);
    for (std::size_t chunk = 0; chunk < chunks; ++chunk) {
      if (inside_diff[chunk].empty()) continue;
      for (std::size_t k = 0; k <= kk; ++k) {
        ins[k] += inside_diff[chunk][c][k];
        bnd[k] += boundary_diff[chunk][c][k];
      }
    }
    out[c].thresholds = thresholds[c];
    out[c].inside.assign(kk, 0);
    out[c].boundary.assign(kk, 0);
    std::int64_t run_in = 0, run_bd = 0;
    for (std::size_t k = 0; k < kk; ++k) {
      run_in += ins[k];
      run_bd += bnd[k];
      out[c].inside[order[c][k]] = run_in;
      out[c].boundary[order[c][k]] = run_bd;
    }
  }
  return out;
}

/// Per-channel sums (and maxima) of sampled values over cell centers inside
/// the window. Sums are accumulated per slab and combined in slab order, so
/// the result does not depend on the worker count.
struct CenterTotals {
  std::vector<double> sum;
  std::vector<double> max;
};

template <class Sampler>
CenterTotals sum_over_centers(const GridSpec& grid, std::size_t channels, Sampler&& sample, const Parallel& par = {}) {
  grid.validate();
  const detail::Lattice lat(grid);
  const auto slabs = static_cast<std::size_t>(lat.res);
  std::vector<double> partial(slabs * channels, 0.0);
  std::vector<double> partial_max(slabs * channels, -std::numeric_limits<double>::infinity());
  parallel_for(slabs, par, [&](std::size_t slab) {
    std::vector<double> values(channels);
    for (std::int64_t cell = 0; cell < lat.cell_layer; ++cell) {
      const PointN p = lat.center(static_cast<std::int64_t>(slab), cell);
      if (!grid.in_window(p)) continue;
      sample(p, std::span<double>(values));
      for (std::size_t c = 0; c < channels; ++c) {
        partial[slab * channels + c] += values[c];
        partial_max[slab * channels + c] = std::max(partial_max[slab * channels + c], values[c]);
      }
    }
  });
  CenterTotals totals{std::vector<double>(channels, 0.0),
                      std::vector<double>(channels, -std::numeric_limits<double>::infinity())};
  for (std::size_t slab = 0; slab < slabs; ++slab) {
    for (std::size_t c = 0; c < channels; ++c) {
      totals.sum[c] += partial[slab * channels + c];
      totals.max[c] = std::max(totals.max[c], partial_max[slab * channels + c]);
    }
  }
  return totals;
}

}  // namespace dirdiff
