#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "dirdiff/fields.hpp"
#include "dirdiff/point.hpp"

namespace dirdiff {

/// Largest contraction factor |s| K a PerturbationMap accepts. Every runner
/// works with |s| <= T and T K <= kMaxContraction.
inline constexpr double kMaxContraction = 0.95;

struct SolverSpec {
  /// Certified bound on |computed - true inverse|.
  double tolerance = 1e-10;
  int max_iterations = 10000;

  void validate() const {
    if (!(tolerance > 0.0) || !std::isfinite(tolerance)) {
      throw std::invalid_argument("SolverSpec: tolerance must be positive and finite");
    }
    if (max_iterations < 1) throw std::invalid_argument("SolverSpec: max_iterations must be >= 1");
  }

  friend bool operator==(const SolverSpec&, const SolverSpec&) = default;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Outcome of a certified inversion.
struct Inverse {
  PointN point;
  /// Number of fixed-point steps taken (0 for the closed-form branch).
  int iterations = 0;
  /// Certified bound on the distance to the exact preimage.
  double error_bound = 0.0;
  /// Length of the first step |X1 - X0|.
  double first_step = 0.0;
};

/// S_s(X) = X + s v(X) for a fixed unit field v and shift s.
class PerturbationMap {
 public:
  PerturbationMap(UnitVectorField field, double s, SolverSpec solver = {})
      : field_(std::make_shared<const UnitVectorField>(std::move(field))), s_(s), solver_(solver) {
    solver_.validate();
    if (!std::isfinite(s)) throw std::invalid_argument("PerturbationMap: shift must be finite");
    q_ = std::abs(s) * field_->lipschitz_k();
    if (!(q_ < 1.0)) {
      throw std::invalid_argument("PerturbationMap: contraction |s|K = " + format_real(q_) +
                                  " must be < 1 for S_s to be invertible");
    }
    if (q_ > kMaxContraction) {
      throw std::invalid_argument("PerturbationMap: contraction |s|K = " + format_real(q_) + " exceeds the limit " +
                                  format_real(kMaxContraction));
    }
  }

  const UnitVectorField& field() const noexcept { return *field_; }
  double shift() const noexcept { return s_; }
  double contraction() const noexcept { return q_; }
  const SolverSpec& solver() const noexcept { return solver_; }
  std::size_t dimension() const noexcept { return field_->dimension(); }

 private:
  std::shared_ptr<const UnitVectorField> field_;
  double s_;
  double q_;
  SolverSpec solver_;
};

inline PointN apply(const PerturbationMap& map, const PointN& x) {
  return axpy(x, map.shift(), map.field()(x));
}

/// Inverts S_s by iterating X <- Z - s v(X) from X0 = Z, stopping when the
/// a-posteriori Banach bound step q / (1 - q) drops to `tolerance`, or earlier
/// when `settled(X, bound)` reports that the caller has what it needs.
template <class Settled>
Inverse invert_until(const PerturbationMap& map, const PointN& z, Settled&& settled) {
  const double s = map.shift();
  const double q = map.contraction();
  const auto& v = map.field();
  if (q == 0.0) {
    // Constant field or zero shift: one step is exact.
    PointN x = axpy(z, -s, v(z));
    return {x, 0, 0.0, distance(x, z)};
  }
  const double ratio = q / (1.0 - q);
  const double tolerance = map.solver().tolerance;
  PointN x = z;
  double first = 0.0;
  for (int k = 1; k <= map.solver().max_iterations; ++k) {
    PointN next = axpy(z, -s, v(x));
    const double step = distance(next, x);
    if (k == 1) first = step;
    const double bound = step * ratio;
    if (bound <= tolerance || settled(next, bound)) return {next, k, bound, first};
    x = next;
  }
  throw SolverError("invert: no certificate within " + std::to_string(map.solver().max_iterations) +
                    " iterations (q = " + format_real(q) + ", tolerance = " + format_real(tolerance) + ")");
}

inline Inverse invert_certified(const PerturbationMap& map, const PointN& z) {
  return invert_until(map, z, [](const PointN&, double) { return false; });
}

/// S_s^{-1}(Z) to within the solver tolerance.
inline PointN invert(const PerturbationMap& map, const PointN& z) { return invert_certified(map, z).point; }

/// Declared Lipschitz constant K / (1 - |s| K) of v o S_s^{-1}.
inline double pushforward_lipschitz(const PerturbationMap& map) {
  return map.field().lipschitz_k() / (1.0 - map.contraction());
}

/// w = v o S_s^{-1}.
inline UnitVectorField pushforward_field(const PerturbationMap& map) {
  Descriptor d{"pushforward", {{"s", map.shift()}}};
  for (const auto& [k, value] : map.field().descriptor().params) d.params.emplace_back("base_" + k, value);
  return UnitVectorField(
      map.dimension(), [map](const PointN& x) { return map.field()(invert(map, x)); }, pushforward_lipschitz(map),
      std::move(d));
}

/// max over points of |S_s^{-1}(S_s(X)) - X|.
inline double roundtrip_error(const PerturbationMap& map, std::span<const PointN> points) {
  double worst = 0.0;
  for (const auto& x : points) worst = std::max(worst, distance(invert(map, apply(map, x)), x));
  return worst;
}

}  // namespace dirdiff
