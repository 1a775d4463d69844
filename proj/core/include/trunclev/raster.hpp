// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "trunclev/geometry.hpp"

namespace trunclev {

enum class PropertyTag { hess_plus, hess_plus_0, sublevel, overlevel, custom };

const char* to_string(PropertyTag tag);

/// Boolean raster over the cells of a grid; true means the property holds
/// at the cell center. Row-major, index = j * nx + i.
struct RegionMask {
  GridSpec grid;
  PropertyTag tag = PropertyTag::custom;
  std::vector<std::uint8_t> cells;

  bool at(int i, int j) const { return cells[static_cast<std::size_t>(j) * grid.nx + i] != 0; }
  void set(int i, int j, bool v) {
    cells[static_cast<std::size_t>(j) * grid.nx + i] = v ? 1 : 0;
  }
  std::size_t count_true() const;
  bool empty_true() const { return count_true() == 0; }

  /// True when p falls in a cell marked true. Points outside the window
  /// are false.
  bool contains_point(Point2 p) const;
};

/// Rasterize an arbitrary cell-center predicate.
RegionMask rasterize(const GridSpec& grid, PropertyTag tag,
                     const std::function<bool(Point2)>& predicate, int workers = 1);

/// 4-connected components of the true cells.
int count_components(const RegionMask& mask);

/// Binary PGM (P5) snapshot, 255 = true, plus a JSON sidecar at
/// path + ".json" carrying the grid metadata. Rows are written top-down
/// (first row is the y_max row).
void write_mask_pgm(const RegionMask& mask, const std::string& path);

}  // namespace trunclev
