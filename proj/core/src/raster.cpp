// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#include "trunclev/raster.hpp"

#include <fstream>
#include <numeric>
#include <stdexcept>

#include "trunclev/json_writer.hpp"
#include "trunclev/parallel.hpp"

namespace trunclev {

const char* to_string(PropertyTag tag) {
  switch (tag) {
    case PropertyTag::hess_plus: return "hess_plus";
    case PropertyTag::hess_plus_0: return "hess_plus_0";
    case PropertyTag::sublevel: return "sublevel";
    case PropertyTag::overlevel: return "overlevel";
    case PropertyTag::custom: return "custom";
  }
  return "custom";
}

std::size_t RegionMask::count_true() const {
  return std::accumulate(cells.begin(), cells.end(), std::size_t{0});
}

bool RegionMask::contains_point(Point2 p) const {
  const auto cell = grid.cell_of(p);
  if (!cell) return false;
  return at(cell->first, cell->second);
}

RegionMask rasterize(const GridSpec& grid, PropertyTag tag,
                     const std::function<bool(Point2)>& predicate, int workers) {
  grid.validate();
  RegionMask mask;
  mask.grid = grid;
  mask.tag = tag;
  mask.cells.assign(static_cast<std::size_t>(grid.nx) * grid.ny, 0);
  const std::size_t n = mask.cells.size();
  parallel_for(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const int i = static_cast<int>(k % grid.nx);
      const int j = static_cast<int>(k / grid.nx);
      mask.cells[k] = predicate(grid.cell_center(i, j)) ? 1 : 0;
    }
  });
  return mask;
}

int count_components(const RegionMask& mask) {
  const int nx = mask.grid.nx;
  const int ny = mask.grid.ny;
  std::vector<std::uint8_t> seen(mask.cells.size(), 0);
  std::vector<std::size_t> stack;
  int components = 0;
  for (std::size_t start = 0; start < mask.cells.size(); ++start) {
    if (!mask.cells[start] || seen[start]) continue;
    ++components;
    stack.push_back(start);
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      const int i = static_cast<int>(k % nx);
      const int j = static_cast<int>(k / nx);
      const int di[4] = {1, -1, 0, 0};
      const int dj[4] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        const int ii = i + di[d];
        const int jj = j + dj[d];
        if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) continue;
        const std::size_t kk = static_cast<std::size_t>(jj) * nx + ii;
        if (mask.cells[kk] && !seen[kk]) {
          seen[kk] = 1;
          stack.push_back(kk);
        }
      }
    }
  }
  return components;
}

void write_mask_pgm(const RegionMask& mask, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_mask_pgm: cannot open " + path);
  out << "P5\n" << mask.grid.nx << " " << mask.grid.ny << "\n255\n";
  // Top row first, so the image reads like the plane.
  for (int j = mask.grid.ny - 1; j >= 0; --j) {
    for (int i = 0; i < mask.grid.nx; ++i) {
      out.put(mask.at(i, j) ? static_cast<char>(255) : static_cast<char>(0));
    }
  }
  out.close();

  JsonWriter w;
  w.begin_object();
  w.key("pgm");
  w.value(path);
  w.key("property_tag");
  w.value(to_string(mask.tag));
  w.key("window");
  w.begin_object();
  w.key("x_min"); w.value(mask.grid.x_min);
  w.key("x_max"); w.value(mask.grid.x_max);
  w.key("y_min"); w.value(mask.grid.y_min);
  w.key("y_max"); w.value(mask.grid.y_max);
  w.key("nx"); w.value(mask.grid.nx);
  w.key("ny"); w.value(mask.grid.ny);
  w.end_object();
  w.key("true_cells");
  w.value(mask.count_true());
  w.key("encoding");
  w.value("P5 8-bit, 255 = property holds, first row is the y_max row");
  w.end_object();

  std::ofstream side(path + ".json");
  if (!side) throw std::runtime_error("write_mask_pgm: cannot open " + path + ".json");
  side << w.str() << "\n";
}

}  // namespace trunclev
