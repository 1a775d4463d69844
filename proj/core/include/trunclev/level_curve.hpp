// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "trunclev/field.hpp"

namespace trunclev {

struct Polyline {
  std::vector<Point2> pts;
  bool closed = false;
};

struct CurveOptions {
  double curve_tol_rel = 1e-12;   ///< vertex polish target |f - c| <= rel * (1 + |c|)
  int polish_iters = 64;
  double regularity_tol = 1e-3;   ///< absolute floor for the regularity test
  double regularity_rel = 1e-2;   ///< relative part: min |grad| vs max |grad| on the curve
  int workers = 1;
};

/// f^{-1}(c) within the window, extracted by marching squares on the grid
/// nodes. Every vertex is polished along its grid edge by bisection.
/// Pinched (critical) level curves are extracted as-is, with regular=false;
/// no topological repair is attempted.
struct LevelCurve {
  double level = 0.0;
  std::vector<Polyline> polylines;
  bool regular = false;       ///< min |grad f| along the curve clears the tolerance
  double min_grad_norm = 0.0;
  double max_grad_norm = 0.0;

  bool nonempty() const { return !polylines.empty(); }
  int components() const { return static_cast<int>(polylines.size()); }
};

LevelCurve level_curve(const ScalarField2& field, double c, const GridSpec& grid,
                       const CurveOptions& opts = {});

/// Field values at the (nx+1) x (ny+1) grid nodes, row-major by j.
std::vector<double> sample_nodes(const ScalarField2& field, const GridSpec& grid,
                                 int workers = 1);

/// level_curve with the node pass precomputed; extracting many levels on
/// one grid only pays the node sampling once.
LevelCurve level_curve_from_nodes(const ScalarField2& field, double c, const GridSpec& grid,
                                  const std::vector<double>& node_values,
                                  const CurveOptions& opts = {});

/// Bordered-Hessian determinant
///
///   | f_xx  f_xy  f_x |
///   | f_yx  f_yy  f_y |
///   | f_x   f_y   0   |
///
/// at p. Sign convention: for |x|^2 on its unit circle the value is -8, and
/// a negative sign corresponds to a locally convex sublevel boundary.
/// Throws std::domain_error near critical points (|grad| <= regularity_tol)
/// where the curvature is undefined.
double curvature_sign(const ScalarField2& field, Point2 p, double regularity_tol = 1e-9);

struct LevelClassification {
  double c = 0.0;
  bool nonempty = false;
  bool regular = false;
  int components = 0;
  bool curvature_sign_constant = false;
  double min_grad_norm = 0.0;
  double max_abs_curvature = 0.0;
};

/// Per-level aggregate of level_curve + curvature_sign along each polyline.
/// The curvature verdict ignores vertices too close to critical points and
/// treats |D| below a small fraction of the curve's max |D| as sign ties.
std::vector<LevelClassification> classify_levels(const ScalarField2& field,
                                                 const std::vector<double>& c_values,
                                                 const GridSpec& grid,
                                                 const CurveOptions& opts = {});

/// SVG export: one path per polyline, the level recorded in a data-level
/// attribute.
void write_level_curves_svg(const std::vector<LevelCurve>& curves, const GridSpec& window,
                            const std::string& path);

/// JSON export of the polylines as arrays of [x, y] vertices.
std::string level_curves_json(const std::vector<LevelCurve>& curves);

}  // namespace trunclev
