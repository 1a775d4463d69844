// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "trunclev/field.hpp"
#include "trunclev/geometry.hpp"

namespace trunclev {

struct CriticalPoint {
  Point2 location;
  double value = 0.0;
  double grad_norm = 0.0;  ///< post-convergence residual
  int morse_index = -1;    ///< 0..2, or -1 when degenerate
  bool degenerate = false;
  bool in_hess_plus = false;
};

struct CriticalSetReport {
  std::vector<CriticalPoint> points;  ///< deduplicated, sorted by (x, y)
  double nu_max = 0.0;                ///< -inf sentinel when empty
  bool empty = true;
  GridSpec window;
  int seeds_used = 0;
  int seeds_discarded = 0;  ///< non-converged Newton runs
};

struct CriticalSearchOptions {
  double newton_tol = 1e-10;
  int max_iters = 64;
  double dedup_radius = 0.0;   ///< 0 = auto (2 * cell diagonal)
  double degen_tol = 1e-10;    ///< |det H| <= degen_tol * ||H||_F^2 flags degenerate
  double seed_fraction = 0.05; ///< raster |grad| quantile below which cells seed
  int workers = 1;
};

struct MorseIndexResult {
  int index = -1;  ///< number of negative Hessian eigenvalues
  bool degenerate = false;
};

/// Morse index of f at p (p is expected to be a converged critical point).
MorseIndexResult morse_index(const ScalarField2& field, Point2 p, double degen_tol);

/// Newton search for zeros of the gradient from raster-derived seeds.
///
/// Seeds are cell centers where the raster |grad f| is a strict 3x3 local
/// minimum, plus all cells in the lowest seed_fraction quantile. Each seed
/// runs Newton on grad f = 0 (damped gradient-norm descent when the Hessian
/// is near-singular); converged points are clustered by dedup_radius,
/// keeping the representative with the smallest residual.
CriticalSetReport find_critical_points(const ScalarField2& field, const GridSpec& grid,
                                       double newton_tol, int max_iters,
                                       const CriticalSearchOptions& opts = {});

/// Maximum critical value; -inf when the report is empty.
double nu_max(const CriticalSetReport& report);

}  // namespace trunclev
