// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

namespace trunclev {

/// A point of the plane. Both coordinates are expected to be finite;
/// API entry points that accept user-supplied points validate this.
struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// A direction / gradient vector, kept distinct from Point2 on purpose.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double norm_sq() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm_sq()); }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double t, Vec2 v) { return {t * v.x, t * v.y}; }
inline Vec2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator+(Point2 p, Vec2 v) { return {p.x + v.x, p.y + v.y}; }
inline Point2 operator-(Point2 p, Vec2 v) { return {p.x - v.x, p.y - v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double distance(Point2 a, Point2 b) { return (a - b).norm(); }
inline Point2 lerp(Point2 a, Point2 b, double t) {
  return {(1.0 - t) * a.x + t * b.x, (1.0 - t) * a.y + t * b.y};
}

inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }
inline bool is_finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

/// Symmetric 2x2 matrix; symmetry is structural (one off-diagonal entry).
struct SymMat2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;

  double det() const { return a11 * a22 - a12 * a12; }
  double trace() const { return a11 + a22; }
  double frobenius_sq() const { return a11 * a11 + 2.0 * a12 * a12 + a22 * a22; }

  Vec2 apply(Vec2 v) const { return {a11 * v.x + a12 * v.y, a12 * v.x + a22 * v.y}; }

  /// Eigenvalues in ascending order (closed form).
  std::pair<double, double> eigenvalues() const {
    const double mean = 0.5 * (a11 + a22);
    const double r = std::hypot(0.5 * (a11 - a22), a12);
    return {mean - r, mean + r};
  }

  /// Unit eigenvector for the smaller eigenvalue.
  Vec2 min_eigenvector() const {
    const auto [lo, hi] = eigenvalues();
    (void)hi;
    // Solve (A - lo I) v = 0; pick the better-conditioned row.
    Vec2 v{a12, lo - a11};
    if (v.norm_sq() < 1e-30) v = {lo - a22, a12};
    if (v.norm_sq() < 1e-30) return {1.0, 0.0};
    const double n = v.norm();
    return {v.x / n, v.y / n};
  }
};

inline bool is_finite(const SymMat2& m) {
  return std::isfinite(m.a11) && std::isfinite(m.a12) && std::isfinite(m.a22);
}

/// Strict positive definiteness with margin eps, by Sylvester's criterion.
/// The determinant margin is scale-aware: it is compared against
/// eps^2 * max(1, a11^2, a22^2) so that badly scaled matrices do not
/// trip the margin spuriously.
inline bool is_positive_definite(const SymMat2& m, double eps) {
  if (!is_finite(m)) throw std::invalid_argument("is_positive_definite: non-finite entries");
  if (eps < 0.0) throw std::invalid_argument("is_positive_definite: eps must be >= 0");
  const double scale = std::max({1.0, m.a11 * m.a11, m.a22 * m.a22});
  return m.a11 > eps && m.det() > eps * eps * scale;
}

/// Positive semidefiniteness with slack eps (both diagonal entries and the
/// determinant are allowed to dip below zero by the scaled slack).
inline bool is_positive_semidefinite(const SymMat2& m, double eps) {
  if (!is_finite(m)) throw std::invalid_argument("is_positive_semidefinite: non-finite entries");
  if (eps < 0.0) throw std::invalid_argument("is_positive_semidefinite: eps must be >= 0");
  const double scale = std::max({1.0, m.a11 * m.a11, m.a22 * m.a22});
  return m.a11 >= -eps && m.a22 >= -eps && m.det() >= -eps * scale;
}

/// A rectangular sampling window with nx-by-ny cells.
/// Cell (i, j) has center (x_min + (i+0.5) dx, y_min + (j+0.5) dy).
struct GridSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = -1.0;
  double y_max = 1.0;
  int nx = 2;
  int ny = 2;

  void validate() const {
    if (!(std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) &&
          std::isfinite(y_max)))
      throw std::invalid_argument("GridSpec: non-finite window bounds");
    if (!(x_min < x_max) || !(y_min < y_max))
      throw std::invalid_argument("GridSpec: window bounds must satisfy min < max");
    if (nx < 2 || ny < 2) throw std::invalid_argument("GridSpec: nx and ny must be >= 2");
  }

  double dx() const { return (x_max - x_min) / nx; }
  double dy() const { return (y_max - y_min) / ny; }
  double cell_diag() const { return std::hypot(dx(), dy()); }
  double window_diag() const { return std::hypot(x_max - x_min, y_max - y_min); }

  Point2 cell_center(int i, int j) const {
    return {x_min + (i + 0.5) * dx(), y_min + (j + 0.5) * dy()};
  }
  /// Grid node (corner) (i, j), i in [0, nx], j in [0, ny].
  Point2 node(int i, int j) const { return {x_min + i * dx(), y_min + j * dy()}; }

  bool contains(Point2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }

  /// Cell containing p, or nullopt when p is outside the window.
  std::optional<std::pair<int, int>> cell_of(Point2 p) const {
    if (!contains(p)) return std::nullopt;
    int i = static_cast<int>((p.x - x_min) / dx());
    int j = static_cast<int>((p.y - y_min) / dy());
    if (i >= nx) i = nx - 1;
    if (j >= ny) j = ny - 1;
    if (i < 0) i = 0;
    if (j < 0) j = 0;
    return std::make_pair(i, j);
  }
};

}  // namespace trunclev
