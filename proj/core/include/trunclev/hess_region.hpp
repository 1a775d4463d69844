// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>

#include "trunclev/field.hpp"
#include "trunclev/raster.hpp"

namespace trunclev {

/// Raised when a verdict cannot be decided within the window.
struct InconclusiveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised by h_max when the mask has no false cell; the field is a
/// global-convexity candidate on the window.
struct EmptyComplementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Cells where the Hessian is strictly positive definite (margin eps).
/// eps = 0 tests the strict minors; a positive eps shrinks the region
/// conservatively, which can only grow the complement and hence
/// over-estimate h_max.
RegionMask hess_plus_mask(const ScalarField2& field, const GridSpec& grid, double eps,
                          int workers = 1);

/// Positive-semidefinite analogue (slack eps).
RegionMask hess_plus_0_mask(const ScalarField2& field, const GridSpec& grid, double eps,
                            int workers = 1);

/// Window-relative boundedness of the false region: true iff no false cell
/// lies within margin_cells of the window boundary. Throws
/// InconclusiveError when the window is too small for the margin.
bool complement_bounded(const RegionMask& mask, int margin_cells);

struct HMaxEstimate {
  double value = 0.0;          ///< refined estimate, >= raster_value
  Point2 witness;              ///< where the refined value is attained
  bool complement_bounded = false;  ///< window-relative verdict, echoed from the caller
  double refinement_radius = 0.0;   ///< final ascent step, a resolution indicator
  double raster_value = 0.0;   ///< max of f over false cell centers (lower bound)
  Point2 raster_witness;
  std::size_t false_cells = 0;
};

/// Maximum of f over the complement of the mask's true region.
///
/// The raster argmax over false cell centers is refined by hill climbing on
/// neighbor cells followed by projected gradient ascent that is confined to
/// false cells, with the step halved whenever a candidate exits the
/// complement or fails to increase f. The raster value is kept as a lower
/// bound alongside the refined value.
HMaxEstimate h_max(const ScalarField2& field, const RegionMask& mask, int refine_iters);

/// Prop-style comparison h >= nu - tol_compare.
bool nu_vs_h_check(const HMaxEstimate& h, double nu, double tol_compare);

}  // namespace trunclev
