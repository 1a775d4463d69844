// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "trunclev/field.hpp"
#include "trunclev/geometry.hpp"

namespace trunclev {

/// T_q(f) = max(q, f), the truncation of f at level q.
class TruncatedField {
 public:
  TruncatedField(FieldPtr base, double q);

  double value(Point2 p) const { return std::max(q_, base_->value(p)); }
  double q() const { return q_; }
  const ScalarField2& base() const { return *base_; }

 private:
  FieldPtr base_;
  double q_;
};

TruncatedField truncate(FieldPtr field, double q);

struct Counterexample {
  Point2 x;
  Point2 y;
  double t = 0.0;        ///< parameter in (0, 1) where the chord inequality fails
  double violation = 0.0;
};

/// Sampling-based convexity verdicts. "convex" means no violation was found
/// at the configured sample budget, not a certificate; every verdict
/// carries samples_used.
struct ConvexityVerdict {
  enum class Kind { convex, quasiconvex_only, neither };
  Kind kind = Kind::convex;
  bool vacuous = false;  ///< the probed set was empty within the window
  std::optional<Counterexample> counterexample;
  long samples_used = 0;

  bool ok() const { return kind == Kind::convex; }
};

/// Value/PSD caches for one (field, grid) pair so that probing many levels
/// pays the raster sampling once.
struct FieldRaster {
  GridSpec grid;
  std::vector<double> cell_values;       ///< f at cell centers, row-major
  std::vector<double> node_values;       ///< f at grid nodes
  std::vector<std::uint8_t> cell_psd;    ///< Hessian PSD (eps = 0) at centers

  static FieldRaster build(const ScalarField2& field, const GridSpec& grid, int workers = 1);
};

struct ProbeOptions {
  double violation_tol_rel = 1e-7;  ///< tolerance = rel * (1 + |level|)
  std::uint64_t seed = 1;
  double curve_tol_rel = 1e-12;
  int workers = 1;
  /// Optional domain restriction: samples, endpoints and chord membership
  /// checks are confined to this predicate (used for restricted fields).
  std::function<bool(Point2)> domain;
  /// Optional shared raster cache; probes build their own when null.
  const FieldRaster* cache = nullptr;
};

/// Is the sublevel set {f <= r} (within the window) a convex set?
///
/// Draws pair_samples random pairs from sublevel cells and checks
/// f((1-t)x + ty) <= r + tol at seg_samples interior parameters, then runs a
/// deterministic pass of chords of the extracted boundary f^{-1}(r)
/// (within- and cross-component). Returns the first violation found.
/// An empty sublevel yields a vacuous convex verdict flagged vacuous.
ConvexityVerdict sublevel_convex(const ScalarField2& field, double r, const GridSpec& grid,
                                 long pair_samples, int seg_samples,
                                 const ProbeOptions& opts = {});

/// Is the truncation T_q(f) a convex function on the window?
///
/// Checks the three-point chord inequality on random segments, on segments
/// through cells where the Hessian fails to be positive semidefinite, and
/// on chords of the extracted level curve f^{-1}(q).
ConvexityVerdict truncation_convex(const ScalarField2& field, double q, const GridSpec& grid,
                                   long pair_samples, int seg_samples,
                                   const ProbeOptions& opts = {});

/// Raised when a bisection bracket does not straddle the threshold.
struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BisectResult {
  double lo = 0.0;
  double hi = 0.0;
  bool at_or_below_lo = false;  ///< the lo end already passed: value <= lo (possibly -inf)
  int iterations = 0;
  long probe_calls = 0;
  long samples_used = 0;

  double width() const { return hi - lo; }
};

struct BisectOptions {
  long pair_samples = 2000;
  int seg_samples = 5;
  int probe_levels = 8;  ///< ladder of probe levels above q, spaced (hi - q)/probe_levels
  ProbeOptions probe;
};

/// Bisection estimate of the smallest quasiconvexity level: at each q the
/// probe runs sublevel_convex at the ladder levels {q + k (hi - q)/8} for
/// k = 0..8. Pre: the probe fails at bracket.lo and passes at bracket.hi;
/// when lo passes, the result is clamped to (lo, lo) with at_or_below_lo set
/// ("<= lo, possibly -inf"); when hi fails, BracketError asks the caller to
/// widen.
BisectResult estimate_sql(const ScalarField2& field, std::pair<double, double> bracket,
                          const GridSpec& grid, double bisect_tol,
                          const BisectOptions& opts = {});

/// Same bisection with truncation_convex as the probe: the smallest
/// convexity level.
BisectResult estimate_scl(const ScalarField2& field, std::pair<double, double> bracket,
                          const GridSpec& grid, double bisect_tol,
                          const BisectOptions& opts = {});

enum class SubdiffKind { singleton_grad, segment_zero_to_grad, singleton_zero };

struct Subdifferential {
  SubdiffKind kind = SubdiffKind::singleton_zero;
  Vec2 grad;  ///< gradient payload; {0,0} for singleton_zero
};

/// Subdifferential of T_q(f) at p: {grad f} above the level, the segment
/// {t grad f : t in [0,1]} on the level (|f - q| <= tol), {0} below.
Subdifferential subdifferential_of_truncation(const ScalarField2& field, double q, Point2 p,
                                              double tol);

/// Aggregated threshold estimates with the paper-facing inequality verdicts
/// wired in by the analysis pipeline.
struct LevelThresholdReport {
  std::pair<double, double> sql_bracket{0.0, 0.0};
  std::pair<double, double> scl_bracket{0.0, 0.0};
  bool sql_at_or_below_lo = false;
  bool scl_at_or_below_lo = false;
  bool available = false;  ///< false when no passing hi end was found
  double h_max = 0.0;
  bool h_max_defined = false;
  double nu_max = 0.0;
  bool nu_max_defined = false;
  bool inequalities_ok = false;
  GridSpec window;
};

}  // namespace trunclev
