#pragma once

#include <cstdint>
#include <random>

#include "dirdiff/point.hpp"

namespace dirdiff {

/// splitmix64 finalizer; derives independent per-task seeds from (seed, index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

/// Uniform real in [lo, hi). Written out instead of std::uniform_real_distribution
/// so sequences are identical across standard library implementations.
inline double uniform(Rng& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

inline PointN uniform_point(Rng& rng, const Box& box) {
  PointN p(box.dimension());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = uniform(rng, box.lo()[i], box.hi()[i]);
  return p;
}

}  // namespace dirdiff
