// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#include "trunclev/level_curve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <unordered_map>

#include "trunclev/json_writer.hpp"
#include "trunclev/parallel.hpp"

namespace trunclev {

namespace {

// Global edge keys: horizontal edge (i, j) runs from node (i,j) to (i+1,j),
// vertical edge (i, j) from node (i,j) to (i,j+1).
inline std::uint64_t hkey(int i, int j, int nx) {
  return (static_cast<std::uint64_t>(j) * nx + i) << 1;
}
inline std::uint64_t vkey(int i, int j, int nx) {
  return ((static_cast<std::uint64_t>(j) * (nx + 1) + i) << 1) | 1ULL;
}

struct Extractor {
  const ScalarField2& field;
  const GridSpec& grid;
  double c;
  double tol;
  int polish_iters;
  const std::vector<double>& node_vals;

  std::vector<Point2> vertices;
  std::unordered_map<std::uint64_t, int> edge_vertex;
  std::vector<std::pair<int, int>> segments;

  double node_val(int i, int j) const {
    return node_vals[static_cast<std::size_t>(j) * (grid.nx + 1) + i];
  }

  // Bisect along the edge to |f - c| <= tol. pa is the inside endpoint.
  Point2 polish(Point2 pa, double va, Point2 pb, double vb) const {
    if (std::fabs(va - c) <= tol) return pa;
    if (std::fabs(vb - c) <= tol) return pb;
    Point2 lo = pa, hi = pb;
    for (int it = 0; it < polish_iters; ++it) {
      const Point2 mid = lerp(lo, hi, 0.5);
      const double vm = field.value(mid);
      if (std::fabs(vm - c) <= tol) return mid;
      if (vm <= c)
        lo = mid;
      else
        hi = mid;
    }
    return lerp(lo, hi, 0.5);
  }

  int vertex_on(std::uint64_t key, Point2 pa, double va, Point2 pb, double vb) {
    auto it = edge_vertex.find(key);
    if (it != edge_vertex.end()) return it->second;
    // Inside endpoint first so the bisection bracket is oriented.
    Point2 v;
    if (va <= c)
      v = polish(pa, va, pb, vb);
    else
      v = polish(pb, vb, pa, va);
    const int idx = static_cast<int>(vertices.size());
    vertices.push_back(v);
    edge_vertex.emplace(key, idx);
    return idx;
  }

  void run() {
    const int nx = grid.nx, ny = grid.ny;
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double v00 = node_val(i, j);
        const double v10 = node_val(i + 1, j);
        const double v11 = node_val(i + 1, j + 1);
        const double v01 = node_val(i, j + 1);
        int code = 0;
        if (v00 <= c) code |= 1;
        if (v10 <= c) code |= 2;
        if (v11 <= c) code |= 4;
        if (v01 <= c) code |= 8;
        if (code == 0 || code == 15) continue;

        const Point2 p00 = grid.node(i, j);
        const Point2 p10 = grid.node(i + 1, j);
        const Point2 p11 = grid.node(i + 1, j + 1);
        const Point2 p01 = grid.node(i, j + 1);

        auto bottom = [&] { return vertex_on(hkey(i, j, nx), p00, v00, p10, v10); };
        auto top = [&] { return vertex_on(hkey(i, j + 1, nx), p01, v01, p11, v11); };
        auto left = [&] { return vertex_on(vkey(i, j, nx), p00, v00, p01, v01); };
        auto right = [&] { return vertex_on(vkey(i + 1, j, nx), p10, v10, p11, v11); };
        auto add = [&](int a, int b) { segments.emplace_back(a, b); };

        switch (code) {
          case 1: add(left(), bottom()); break;
          case 2: add(bottom(), right()); break;
          case 3: add(left(), right()); break;
          case 4: add(top(), right()); break;
          case 5: {
            const bool center_in = field.value(grid.cell_center(i, j)) <= c;
            if (center_in) {
              add(left(), top());
              add(bottom(), right());
            } else {
              add(left(), bottom());
              add(top(), right());
            }
            break;
          }
          case 6: add(bottom(), top()); break;
          case 7: add(left(), top()); break;
          case 8: add(left(), top()); break;
          case 9: add(bottom(), top()); break;
          case 10: {
            const bool center_in = field.value(grid.cell_center(i, j)) <= c;
            if (center_in) {
              add(left(), bottom());
              add(top(), right());
            } else {
              add(left(), top());
              add(bottom(), right());
            }
            break;
          }
          case 11: add(top(), right()); break;
          case 12: add(left(), right()); break;
          case 13: add(bottom(), right()); break;
          case 14: add(left(), bottom()); break;
          default: break;
        }
      }
    }
  }
};

}  // namespace

std::vector<double> sample_nodes(const ScalarField2& field, const GridSpec& grid, int workers) {
  grid.validate();
  const int nx = grid.nx, ny = grid.ny;
  std::vector<double> node_vals(static_cast<std::size_t>(nx + 1) * (ny + 1));
  parallel_for(node_vals.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const int i = static_cast<int>(k % (nx + 1));
      const int j = static_cast<int>(k / (nx + 1));
      node_vals[k] = field.value(grid.node(i, j));
    }
  });
  return node_vals;
}

LevelCurve level_curve(const ScalarField2& field, double c, const GridSpec& grid,
                       const CurveOptions& opts) {
  return level_curve_from_nodes(field, c, grid, sample_nodes(field, grid, opts.workers), opts);
}

LevelCurve level_curve_from_nodes(const ScalarField2& field, double c, const GridSpec& grid,
                                  const std::vector<double>& node_vals,
                                  const CurveOptions& opts) {
  grid.validate();
  if (!std::isfinite(c)) throw std::invalid_argument("level_curve: non-finite level");
  if (node_vals.size() != static_cast<std::size_t>(grid.nx + 1) * (grid.ny + 1))
    throw std::invalid_argument("level_curve: node value cache does not match the grid");

  const double tol = opts.curve_tol_rel * (1.0 + std::fabs(c));
  Extractor ex{field, grid, c, tol, opts.polish_iters, node_vals, {}, {}, {}};
  ex.run();

  LevelCurve out;
  out.level = c;
  if (ex.segments.empty()) return out;

  // Chain segments into polylines. Every vertex has degree <= 2.
  const int nv = static_cast<int>(ex.vertices.size());
  std::vector<std::array<int, 2>> nbr(nv, {-1, -1});
  std::vector<std::array<int, 2>> seg_of(nv, {-1, -1});
  for (int s = 0; s < static_cast<int>(ex.segments.size()); ++s) {
    const auto [a, b] = ex.segments[s];
    for (int v : {a, b}) {
      const int other = (v == a) ? b : a;
      auto& slots = nbr[v];
      auto& segs = seg_of[v];
      if (slots[0] < 0) {
        slots[0] = other;
        segs[0] = s;
      } else if (slots[1] < 0) {
        slots[1] = other;
        segs[1] = s;
      }
      // A third incidence cannot happen on a cell complex.
    }
  }

  std::vector<char> seg_used(ex.segments.size(), 0);
  auto walk = [&](int start_vertex, bool closed) {
    Polyline pl;
    pl.closed = closed;
    int v = start_vertex;
    pl.pts.push_back(ex.vertices[v]);
    int prev_seg = -1;
    for (;;) {
      int next_seg = -1;
      for (int slot = 0; slot < 2; ++slot) {
        const int s = seg_of[v][slot];
        if (s >= 0 && s != prev_seg && !seg_used[s]) {
          next_seg = s;
          break;
        }
      }
      if (next_seg < 0) break;
      seg_used[next_seg] = 1;
      const auto [a, b] = ex.segments[next_seg];
      v = (v == a) ? b : a;
      pl.pts.push_back(ex.vertices[v]);
      prev_seg = next_seg;
      if (closed && v == start_vertex) break;
    }
    // Closed polylines do not repeat the first vertex.
    if (closed && pl.pts.size() > 1 && v == start_vertex) pl.pts.pop_back();
    return pl;
  };

  // Open chains first (they start at degree-1 vertices), then cycles.
  for (int v = 0; v < nv; ++v) {
    if (nbr[v][0] >= 0 && nbr[v][1] < 0) {
      const int s = seg_of[v][0];
      if (!seg_used[s]) out.polylines.push_back(walk(v, false));
    }
  }
  for (int s = 0; s < static_cast<int>(ex.segments.size()); ++s) {
    if (!seg_used[s]) out.polylines.push_back(walk(ex.segments[s].first, true));
  }

  double mn = std::numeric_limits<double>::infinity();
  double mx = 0.0;
  for (const auto& pl : out.polylines) {
    for (const auto& p : pl.pts) {
      const double g = field.gradient(p).norm();
      mn = std::min(mn, g);
      mx = std::max(mx, g);
    }
  }
  out.min_grad_norm = mn;
  out.max_grad_norm = mx;
  out.regular = mn > std::max(opts.regularity_tol, opts.regularity_rel * mx);
  return out;
}

double curvature_sign(const ScalarField2& field, Point2 p, double regularity_tol) {
  if (!is_finite(p)) throw std::invalid_argument("curvature_sign: non-finite point");
  const Vec2 g = field.gradient(p);
  if (g.norm() <= regularity_tol)
    throw std::domain_error("curvature_sign: gradient vanishes, curvature undefined");
  const SymMat2 h = field.hessian(p);
  return 2.0 * g.x * g.y * h.a12 - g.x * g.x * h.a22 - g.y * g.y * h.a11;
}

std::vector<LevelClassification> classify_levels(const ScalarField2& field,
                                                 const std::vector<double>& c_values,
                                                 const GridSpec& grid,
                                                 const CurveOptions& opts) {
  std::vector<LevelClassification> out;
  out.reserve(c_values.size());
  for (const double c : c_values) {
    LevelClassification rec;
    rec.c = c;
    const LevelCurve curve = level_curve(field, c, grid, opts);
    rec.nonempty = curve.nonempty();
    if (!rec.nonempty) {
      out.push_back(rec);
      continue;
    }
    rec.components = curve.components();
    rec.regular = curve.regular;
    rec.min_grad_norm = curve.min_grad_norm;

    const double grad_floor =
        std::max(opts.regularity_tol, opts.regularity_rel * curve.max_grad_norm);
    std::vector<double> dets;
    for (const auto& pl : curve.polylines) {
      const std::size_t step = std::max<std::size_t>(1, pl.pts.size() / 512);
      for (std::size_t k = 0; k < pl.pts.size(); k += step) {
        const Point2 p = pl.pts[k];
        if (field.gradient(p).norm() <= grad_floor) continue;
        dets.push_back(curvature_sign(field, p, 0.0));
      }
    }
    double max_abs = 0.0;
    for (double d : dets) max_abs = std::max(max_abs, std::fabs(d));
    rec.max_abs_curvature = max_abs;
    const double tie = 1e-7 * std::max(1.0, max_abs);
    bool pos = false, neg = false;
    for (double d : dets) {
      if (d > tie) pos = true;
      if (d < -tie) neg = true;
    }
    rec.curvature_sign_constant = !(pos && neg);
    out.push_back(rec);
  }
  return out;
}

void write_level_curves_svg(const std::vector<LevelCurve>& curves, const GridSpec& window,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_level_curves_svg: cannot open " + path);
  const double w = 800.0;
  const double h = w * (window.y_max - window.y_min) / (window.x_max - window.x_min);
  const auto X = [&](double x) {
    return (x - window.x_min) / (window.x_max - window.x_min) * w;
  };
  const auto Y = [&](double y) {
    return h - (y - window.y_min) / (window.y_max - window.y_min) * h;
  };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  int color = 0;
  char buf[64];
  for (const auto& curve : curves) {
    const char* stroke = palette[color++ % 8];
    for (const auto& pl : curve.polylines) {
      out << "  <path data-level=\"";
      std::snprintf(buf, sizeof(buf), "%.17g", curve.level);
      out << buf << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.2\" d=\"";
      for (std::size_t k = 0; k < pl.pts.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%c%.3f %.3f", k == 0 ? 'M' : 'L', X(pl.pts[k].x),
                      Y(pl.pts[k].y));
        out << buf << " ";
      }
      if (pl.closed) out << "Z";
      out << "\"/>\n";
    }
  }
  out << "</svg>\n";
}

std::string level_curves_json(const std::vector<LevelCurve>& curves) {
  JsonWriter w;
  w.begin_array();
  for (const auto& curve : curves) {
    w.begin_object();
    w.key("level");
    w.value(curve.level);
    w.key("regular");
    w.value(curve.regular);
    w.key("min_grad_norm");
    w.value(curve.min_grad_norm);
    w.key("components");
    w.value(curve.components());
    w.key("polylines");
    w.begin_array();
    for (const auto& pl : curve.polylines) {
      w.begin_object();
      w.key("closed");
      w.value(pl.closed);
      w.key("vertices");
      w.begin_array();
      for (const auto& p : pl.pts) {
        w.begin_array();
        w.value(p.x);
        w.value(p.y);
        w.end_array();
      }
      w.end_array();
      w.end_object();
    }
    w.end_array();
    w.end_object();
  }
  w.end_array();
  return w.str();
}

}  // namespace trunclev
