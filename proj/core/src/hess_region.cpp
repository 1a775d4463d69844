// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#include "trunclev/hess_region.hpp"

#include <cmath>
#include <vector>

#include "trunclev/parallel.hpp"

namespace trunclev {

RegionMask hess_plus_mask(const ScalarField2& field, const GridSpec& grid, double eps,
                          int workers) {
  return rasterize(
      grid, PropertyTag::hess_plus,
      [&field, eps](Point2 p) { return is_positive_definite(field.hessian(p), eps); }, workers);
}

RegionMask hess_plus_0_mask(const ScalarField2& field, const GridSpec& grid, double eps,
                            int workers) {
  return rasterize(
      grid, PropertyTag::hess_plus_0,
      [&field, eps](Point2 p) { return is_positive_semidefinite(field.hessian(p), eps); },
      workers);
}

bool complement_bounded(const RegionMask& mask, int margin_cells) {
  if (margin_cells < 1) throw std::invalid_argument("complement_bounded: margin_cells >= 1");
  const int nx = mask.grid.nx;
  const int ny = mask.grid.ny;
  if (2 * margin_cells >= nx || 2 * margin_cells >= ny)
    throw InconclusiveError("complement_bounded: window too small for the requested margin");
  for (int j = 0; j < ny; ++j) {
    const bool j_band = (j < margin_cells || j >= ny - margin_cells);
    for (int i = 0; i < nx; ++i) {
      if (!j_band && i >= margin_cells && i < nx - margin_cells) {
        i = nx - margin_cells - 1;  // skip the interior of a non-band row
        continue;
      }
      if (!mask.at(i, j)) return false;
    }
  }
  return true;
}

namespace {

struct RasterMax {
  double value = -std::numeric_limits<double>::infinity();
  int i = -1, j = -1;
};

// Order-independent reduction: larger value wins, exact ties broken by
// lexicographic (i, j).
void merge(RasterMax& into, const RasterMax& other) {
  if (other.i < 0) return;
  if (other.value > into.value ||
      (other.value == into.value &&
       (other.i < into.i || (other.i == into.i && other.j < into.j))))
    into = other;
}

}  // namespace

HMaxEstimate h_max(const ScalarField2& field, const RegionMask& mask, int refine_iters) {
  const GridSpec& grid = mask.grid;
  const std::size_t n = mask.cells.size();

  std::size_t false_cells = 0;
  RasterMax best;
  for (std::size_t k = 0; k < n; ++k) {
    if (mask.cells[k]) continue;
    ++false_cells;
    const int i = static_cast<int>(k % grid.nx);
    const int j = static_cast<int>(k / grid.nx);
    RasterMax cand{field.value(grid.cell_center(i, j)), i, j};
    merge(best, cand);
  }
  if (false_cells == 0)
    throw EmptyComplementError("h_max: the mask has no false cell, complement is empty");

  HMaxEstimate est;
  est.false_cells = false_cells;
  est.raster_value = best.value;
  est.raster_witness = grid.cell_center(best.i, best.j);

  // Discrete hill climb over false neighbor cell centers.
  int ci = best.i, cj = best.j;
  double cv = best.value;
  for (int iter = 0; iter < refine_iters; ++iter) {
    int ni = ci, nj = cj;
    double nv = cv;
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        const int ii = ci + di, jj = cj + dj;
        if (ii < 0 || ii >= grid.nx || jj < 0 || jj >= grid.ny) continue;
        if (mask.at(ii, jj)) continue;
        const double v = field.value(grid.cell_center(ii, jj));
        if (v > nv) {
          nv = v;
          ni = ii;
          nj = jj;
        }
      }
    }
    if (ni == ci && nj == cj) break;
    ci = ni;
    cj = nj;
    cv = nv;
  }

  // Continuous ascent confined to false cells; step halves on exit or
  // non-improvement. The constrained max sits on the region boundary, so
  // this walks to the boundary and then resolves it geometrically.
  Point2 p = grid.cell_center(ci, cj);
  double fp = cv;
  double step = grid.cell_diag();
  for (int iter = 0; iter < refine_iters && step > 1e-14 * grid.window_diag(); ++iter) {
    const Vec2 g = field.gradient(p);
    const double gn = g.norm();
    if (!(gn > 0.0) || !std::isfinite(gn)) break;
    const Point2 cand = p + (step / gn) * g;
    const auto cell = grid.cell_of(cand);
    const bool ok = cell && !mask.at(cell->first, cell->second);
    const double fc = ok ? field.value(cand) : 0.0;
    if (ok && fc > fp) {
      p = cand;
      fp = fc;
    } else {
      step *= 0.5;
    }
  }

  est.value = std::max(fp, est.raster_value);
  est.witness = fp >= est.raster_value ? p : est.raster_witness;
  est.refinement_radius = step;
  return est;
}

bool nu_vs_h_check(const HMaxEstimate& h, double nu, double tol_compare) {
  if (!std::isfinite(h.value) || !std::isfinite(nu))
    throw std::invalid_argument("nu_vs_h_check: non-finite inputs");
  return h.value >= nu - tol_compare;
}

}  // namespace trunclev
