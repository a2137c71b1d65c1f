#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

namespace dirdiff {

/// Largest dimension a PointN can hold. Points are stored inline so the hot
/// quadrature and fixed-point loops never allocate.
inline constexpr std::size_t kMaxDimension = 8;

/// A point (or vector) of R^n with 1 <= n <= kMaxDimension.
class PointN {
 public:
  PointN() = default;

  explicit PointN(std::size_t dimension) : n_(dimension) {
    if (dimension == 0 || dimension > kMaxDimension) {
      throw std::invalid_argument("PointN: dimension must be in [1, " +
                                  std::to_string(kMaxDimension) + "], got " +
                                  std::to_string(dimension));
    }
  }

  PointN(std::initializer_list<double> coords) : PointN(coords.size()) {
    std::copy(coords.begin(), coords.end(), c_.begin());
  }

  static PointN filled(std::size_t dimension, double value) {
    PointN p(dimension);
    std::fill_n(p.c_.begin(), dimension, value);
    return p;
  }

  static PointN unit(std::size_t dimension, std::size_t axis) {
    PointN p(dimension);
    p[axis] = 1.0;
    return p;
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t dimension() const noexcept { return n_; }

  double& operator[](std::size_t i) noexcept {
    assert(i < n_);
    return c_[i];
  }
  double operator[](std::size_t i) const noexcept {
    assert(i < n_);
    return c_[i];
  }

  std::span<double> coords() noexcept { return {c_.data(), n_}; }
  std::span<const double> coords() const noexcept { return {c_.data(), n_}; }
  double* begin() noexcept { return c_.data(); }
  double* end() noexcept { return c_.data() + n_; }
  const double* begin() const noexcept { return c_.data(); }
  const double* end() const noexcept { return c_.data() + n_; }

  bool all_finite() const noexcept {
    return std::all_of(begin(), end(), [](double x) { return std::isfinite(x); });
  }

  PointN& operator+=(const PointN& o) noexcept {
    for (std::size_t i = 0; i < n_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  PointN& operator-=(const PointN& o) noexcept {
    for (std::size_t i = 0; i < n_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  PointN& operator*=(double a) noexcept {
    for (std::size_t i = 0; i < n_; ++i) c_[i] *= a;
    return *this;
  }

  friend PointN operator+(PointN a, const PointN& b) noexcept { return a += b; }
  friend PointN operator-(PointN a, const PointN& b) noexcept { return a -= b; }
  friend PointN operator*(double s, PointN a) noexcept { return a *= s; }
  friend PointN operator*(PointN a, double s) noexcept { return a *= s; }

  friend bool operator==(const PointN& a, const PointN& b) noexcept {
    return a.n_ == b.n_ && std::equal(a.begin(), a.end(), b.begin());
  }

 private:
  std::array<double, kMaxDimension> c_{};
  std::size_t n_ = 0;
};

/// x + s * d, without the temporary of the operator form.
inline PointN axpy(const PointN& x, double s, const PointN& d) noexcept {
  PointN r = x;
  for (std::size_t i = 0; i < x.size(); ++i) r[i] += s * d[i];
  return r;
}

inline double dot(const PointN& a, const PointN& b) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm(const PointN& a) noexcept {
  if (a.size() == 2) return std::hypot(a[0], a[1]);
  return std::sqrt(dot(a, a));
}

inline double distance(const PointN& a, const PointN& b) noexcept {
  if (a.size() == 2) return std::hypot(a[0] - b[0], a[1] - b[1]);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

/// Volume of the unit ball of R^n.
inline double unit_ball_volume(std::size_t n) {
  const double half = 0.5 * static_cast<double>(n);
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

/// Closed axis-aligned box [lo, hi] in R^n.
class Box {
 public:
  Box() = default;
  Box(PointN lo, PointN hi) : lo_(lo), hi_(hi) {
    if (lo.size() != hi.size()) throw std::invalid_argument("Box: corner dimensions differ");
    for (std::size_t i = 0; i < lo.size(); ++i) {
      if (!(lo[i] <= hi[i])) throw std::invalid_argument("Box: lo must not exceed hi on every axis");
    }
  }

  /// The cube [lo, hi]^n.
  static Box cube(std::size_t n, double lo, double hi) {
    return {PointN::filled(n, lo), PointN::filled(n, hi)};
  }

  const PointN& lo() const noexcept { return lo_; }
  const PointN& hi() const noexcept { return hi_; }
  std::size_t dimension() const noexcept { return lo_.size(); }

  bool contains(const PointN& x) const noexcept {
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      if (x[i] < lo_[i] || x[i] > hi_[i]) return false;
    }
    return true;
  }

  bool contains(const Box& b) const noexcept { return contains(b.lo_) && contains(b.hi_); }

  /// True when every side has positive length.
  bool nondegenerate() const noexcept {
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      if (!(hi_[i] > lo_[i])) return false;
    }
    return lo_.size() > 0;
  }

  double volume() const noexcept {
    double v = 1.0;
    for (std::size_t i = 0; i < lo_.size(); ++i) v *= hi_[i] - lo_[i];
    return v;
  }

  Box dilated(double r) const {
    PointN lo = lo_, hi = hi_;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] -= r;
      hi[i] += r;
    }
    return {lo, hi};
  }

  /// Euclidean distance from x to the box (0 inside).
  double distance_to(const PointN& x) const noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      double d = 0.0;
      if (x[i] < lo_[i]) d = lo_[i] - x[i];
      else if (x[i] > hi_[i]) d = x[i] - hi_[i];
      acc += d * d;
    }
    return std::sqrt(acc);
  }

  /// Largest Euclidean norm attained on the box.
  double max_norm() const noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      const double m = std::max(std::abs(lo_[i]), std::abs(hi_[i]));
      acc += m * m;
    }
    return std::sqrt(acc);
  }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  PointN lo_;
  PointN hi_;
};

}  // namespace dirdiff
