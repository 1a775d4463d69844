// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#include "trunclev/truncation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "trunclev/level_curve.hpp"
#include "trunclev/parallel.hpp"
#include "trunclev/rng.hpp"

namespace trunclev {

TruncatedField::TruncatedField(FieldPtr base, double q) : base_(std::move(base)), q_(q) {
  if (!base_) throw std::invalid_argument("TruncatedField: null base field");
  if (!std::isfinite(q_)) throw std::invalid_argument("TruncatedField: q must be finite");
}

TruncatedField truncate(FieldPtr field, double q) { return TruncatedField(std::move(field), q); }

FieldRaster FieldRaster::build(const ScalarField2& field, const GridSpec& grid, int workers) {
  grid.validate();
  FieldRaster r;
  r.grid = grid;
  const std::size_t n = static_cast<std::size_t>(grid.nx) * grid.ny;
  r.cell_values.resize(n);
  r.cell_psd.resize(n);
  parallel_for(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const int i = static_cast<int>(k % grid.nx);
      const int j = static_cast<int>(k / grid.nx);
      const Point2 p = grid.cell_center(i, j);
      r.cell_values[k] = field.value(p);
      r.cell_psd[k] = is_positive_semidefinite(field.hessian(p), 0.0) ? 1 : 0;
    }
  });
  r.node_values = sample_nodes(field, grid, workers);
  return r;
}

namespace {

std::uint64_t level_seed(std::uint64_t base, double level, std::string_view tag) {
  std::uint64_t s = base ^ std::bit_cast<std::uint64_t>(level) ^ fnv1a(tag);
  return splitmix64(s);
}

struct ProbeState {
  long samples_used = 0;
  std::optional<Counterexample> ce;

  bool violated() const { return ce.has_value(); }
};

// Fixed interior parameter grid; includes 1/2 when m is odd.
std::vector<double> fixed_ts(int m) {
  std::vector<double> ts;
  ts.reserve(m);
  for (int j = 1; j <= m; ++j) ts.push_back(static_cast<double>(j) / (m + 1));
  return ts;
}

// Nudge a level-curve vertex strictly inside {f <= r}.
std::optional<Point2> nudge_inside(const ScalarField2& field, Point2 v, double r,
                                   double nudge_f) {
  const Vec2 g = field.gradient(v);
  const double gn2 = g.norm_sq();
  if (!(gn2 > 1e-24)) return std::nullopt;
  const double step = (field.value(v) - (r - nudge_f)) / gn2;
  const Point2 w = v - step * g;
  if (!is_finite(w) || field.value(w) > r) return std::nullopt;
  return w;
}

constexpr int kStrides[] = {1, 2, 4, 8, 16, 32, 64};

}  // namespace

ConvexityVerdict sublevel_convex(const ScalarField2& field, double r, const GridSpec& grid,
                                 long pair_samples, int seg_samples, const ProbeOptions& opts) {
  grid.validate();
  if (pair_samples < 1) throw std::invalid_argument("sublevel_convex: pair_samples >= 1");
  if (seg_samples < 3) throw std::invalid_argument("sublevel_convex: seg_samples >= 3");
  if (!std::isfinite(r)) throw std::invalid_argument("sublevel_convex: non-finite level");

  FieldRaster local;
  const FieldRaster* cache = opts.cache;
  if (cache == nullptr || cache->grid.nx != grid.nx || cache->grid.ny != grid.ny) {
    local = FieldRaster::build(field, grid, opts.workers);
    cache = &local;
  }

  const double tol = opts.violation_tol_rel * (1.0 + std::fabs(r));
  const auto& domain = opts.domain;
  ProbeState st;

  auto check_chord = [&](Point2 a, Point2 b, double t) -> bool {
    const Point2 m = lerp(a, b, t);
    ++st.samples_used;
    const double v = field.value(m);
    const bool inside = v <= r + tol && (!domain || domain(m));
    if (!inside) {
      st.ce = Counterexample{a, b, t, v - r};
      return true;
    }
    return false;
  };

  // Membership cells.
  std::vector<std::size_t> cells;
  for (std::size_t k = 0; k < cache->cell_values.size(); ++k) {
    if (cache->cell_values[k] > r) continue;
    if (domain) {
      const int i = static_cast<int>(k % grid.nx);
      const int j = static_cast<int>(k / grid.nx);
      if (!domain(grid.cell_center(i, j))) continue;
    }
    cells.push_back(k);
  }
  if (cells.empty()) {
    ConvexityVerdict v;
    v.kind = ConvexityVerdict::Kind::convex;
    v.vacuous = true;
    return v;
  }

  // Pass A: random pairs from sublevel cells, stratified interior parameters.
  Rng rng(level_seed(opts.seed, r, "sublevel"));
  const double dx = grid.dx(), dy = grid.dy();
  auto sample_in = [&](std::size_t k) {
    const int i = static_cast<int>(k % grid.nx);
    const int j = static_cast<int>(k / grid.nx);
    const Point2 c = grid.cell_center(i, j);
    const Point2 p{c.x + (rng.uniform01() - 0.5) * dx, c.y + (rng.uniform01() - 0.5) * dy};
    if (field.value(p) > r || (domain && !domain(p))) return c;  // center qualifies
    return p;
  };
  for (long s = 0; s < pair_samples && !st.violated(); ++s) {
    const Point2 p1 = sample_in(cells[rng.below(cells.size())]);
    const Point2 p2 = sample_in(cells[rng.below(cells.size())]);
    for (int i = 0; i < seg_samples; ++i) {
      const double t = (i + rng.uniform01()) / seg_samples;
      if (check_chord(p1, p2, t)) break;
    }
  }

  // Pass B: deterministic chords of the extracted boundary. Within-component
  // strides catch shallow dimples near the threshold; cross-component
  // representatives catch disconnected sublevels.
  if (!st.violated()) {
    CurveOptions copts;
    copts.curve_tol_rel = opts.curve_tol_rel;
    copts.workers = 1;
    const LevelCurve curve = level_curve_from_nodes(field, r, grid, cache->node_values, copts);
    const double nudge_f = 100.0 * opts.curve_tol_rel * (1.0 + std::fabs(r));
    const auto ts = fixed_ts(std::max(3, seg_samples));

    std::vector<std::vector<Point2>> comp;
    for (const auto& pl : curve.polylines) {
      std::vector<Point2> pts;
      pts.reserve(pl.pts.size());
      for (const auto& v : pl.pts) {
        if (domain && !domain(v)) continue;
        if (auto w = nudge_inside(field, v, r, nudge_f)) pts.push_back(*w);
      }
      if (!pts.empty()) comp.push_back(std::move(pts));
    }
    for (const auto& pts : comp) {
      const int n = static_cast<int>(pts.size());
      if (n < 2) continue;
      for (int stride : kStrides) {
        if (st.violated()) break;
        if (stride >= n) break;
        for (int i = 0; i < n && !st.violated(); ++i) {
          const Point2 a = pts[i];
          const Point2 b = pts[(i + stride) % n];
          for (double t : ts) {
            if (check_chord(a, b, t)) break;
          }
        }
      }
      if (st.violated()) break;
    }
    if (!st.violated() && comp.size() > 1) {
      auto reps = [&](const std::vector<Point2>& pts) {
        std::vector<Point2> out;
        const std::size_t step = std::max<std::size_t>(1, pts.size() / 8);
        for (std::size_t i = 0; i < pts.size(); i += step) out.push_back(pts[i]);
        return out;
      };
      for (std::size_t aidx = 0; aidx < comp.size() && !st.violated(); ++aidx) {
        for (std::size_t bidx = aidx + 1; bidx < comp.size() && !st.violated(); ++bidx) {
          for (const Point2& a : reps(comp[aidx])) {
            if (st.violated()) break;
            for (const Point2& b : reps(comp[bidx])) {
              bool broke = false;
              for (double t : ts) {
                if (check_chord(a, b, t)) {
                  broke = true;
                  break;
                }
              }
              if (broke) break;
            }
          }
        }
      }
    }
  }

  ConvexityVerdict out;
  out.samples_used = st.samples_used;
  if (st.violated()) {
    out.kind = ConvexityVerdict::Kind::neither;
    out.counterexample = st.ce;
  } else {
    out.kind = ConvexityVerdict::Kind::convex;
  }
  return out;
}

ConvexityVerdict truncation_convex(const ScalarField2& field, double q, const GridSpec& grid,
                                   long pair_samples, int seg_samples,
                                   const ProbeOptions& opts) {
  grid.validate();
  if (pair_samples < 1) throw std::invalid_argument("truncation_convex: pair_samples >= 1");
  if (seg_samples < 3) throw std::invalid_argument("truncation_convex: seg_samples >= 3");
  if (!std::isfinite(q)) throw std::invalid_argument("truncation_convex: non-finite level");

  FieldRaster local;
  const FieldRaster* cache = opts.cache;
  if (cache == nullptr || cache->grid.nx != grid.nx || cache->grid.ny != grid.ny) {
    local = FieldRaster::build(field, grid, opts.workers);
    cache = &local;
  }

  const double tol = opts.violation_tol_rel * (1.0 + std::fabs(q));
  auto T = [&](Point2 p) { return std::max(q, field.value(p)); };
  ProbeState st;

  // Three-point chord inequality on segment [x, y] at parameters s < t < u,
  // reported in normalized endpoint form.
  auto check_triple = [&](Point2 x, Point2 y, double s, double t, double u) -> bool {
    ++st.samples_used;
    const Point2 a = lerp(x, y, s);
    const Point2 b = lerp(x, y, u);
    const double tt = (t - s) / (u - s);
    const double viol = T(lerp(x, y, t)) - ((1.0 - tt) * T(a) + tt * T(b));
    if (viol > tol) {
      st.ce = Counterexample{a, b, tt, viol};
      return true;
    }
    return false;
  };

  // Pass A: random segments anywhere in the window.
  Rng rng(level_seed(opts.seed, q, "truncation"));
  auto window_point = [&]() -> Point2 {
    return {rng.uniform(grid.x_min, grid.x_max), rng.uniform(grid.y_min, grid.y_max)};
  };
  for (long s = 0; s < pair_samples && !st.violated(); ++s) {
    const Point2 x = window_point();
    const Point2 y = window_point();
    if (opts.domain && (!opts.domain(x) || !opts.domain(y))) continue;
    if (check_triple(x, y, 0.25, 0.5, 0.75)) break;
    for (int i = 1; i < seg_samples && !st.violated(); ++i) {
      double abc[3] = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
      std::sort(abc, abc + 3);
      if (abc[1] - abc[0] < 1e-6 || abc[2] - abc[1] < 1e-6) continue;
      if (check_triple(x, y, abc[0], abc[1], abc[2])) break;
    }
  }

  // Pass B: short segments through cells whose Hessian is not PSD, aligned
  // with the most negative curvature direction. Only segments staying in
  // {f > q} can witness, since T is flat below the level.
  if (!st.violated()) {
    std::vector<std::size_t> flagged;
    for (std::size_t k = 0; k < cache->cell_psd.size(); ++k) {
      if (!cache->cell_psd[k] && cache->cell_values[k] > q) flagged.push_back(k);
    }
    const std::size_t stride = std::max<std::size_t>(1, flagged.size() / 4096);
    const double diag = grid.cell_diag();
    for (std::size_t idx = 0; idx < flagged.size() && !st.violated(); idx += stride) {
      const std::size_t k = flagged[idx];
      const int i = static_cast<int>(k % grid.nx);
      const int j = static_cast<int>(k / grid.nx);
      const Point2 c = grid.cell_center(i, j);
      const Vec2 dir = field.hessian(c).min_eigenvector();
      for (double h : {0.5 * diag, 1.5 * diag, 4.0 * diag}) {
        const Point2 e1 = c - h * dir;
        const Point2 e2 = c + h * dir;
        if (field.value(e1) <= q || field.value(e2) <= q) continue;
        if (check_triple(e1, e2, 0.0, 0.5, 1.0)) break;
        if (check_triple(e1, e2, 0.25, 0.5, 0.75)) break;
      }
    }
  }

  // Pass C: chords of the level curve f^{-1}(q). A chord with both ends on
  // the curve has T = q (+/- polish slack) at the ends, so any interior
  // point with f above the level breaks convexity of the truncation.
  if (!st.violated()) {
    CurveOptions copts;
    copts.curve_tol_rel = opts.curve_tol_rel;
    copts.workers = 1;
    const LevelCurve curve = level_curve_from_nodes(field, q, grid, cache->node_values, copts);
    const auto ts = fixed_ts(std::max(3, seg_samples));
    std::vector<std::vector<Point2>> comp;
    for (const auto& pl : curve.polylines) {
      if (opts.domain) {
        std::vector<Point2> pts;
        for (const auto& v : pl.pts)
          if (opts.domain(v)) pts.push_back(v);
        if (!pts.empty()) comp.push_back(std::move(pts));
      } else {
        comp.push_back(pl.pts);
      }
    }
    for (const auto& pts : comp) {
      const int n = static_cast<int>(pts.size());
      if (n < 2) continue;
      for (int stride : kStrides) {
        if (st.violated()) break;
        if (stride >= n) break;
        for (int i = 0; i < n && !st.violated(); ++i) {
          const Point2 a = pts[i];
          const Point2 b = pts[(i + stride) % n];
          for (double t : ts) {
            if (check_triple(a, b, 0.0, t, 1.0)) break;
          }
        }
      }
      if (st.violated()) break;
    }
    if (!st.violated() && comp.size() > 1) {
      for (std::size_t aidx = 0; aidx < comp.size() && !st.violated(); ++aidx) {
        for (std::size_t bidx = aidx + 1; bidx < comp.size() && !st.violated(); ++bidx) {
          const std::size_t sa = std::max<std::size_t>(1, comp[aidx].size() / 8);
          const std::size_t sb = std::max<std::size_t>(1, comp[bidx].size() / 8);
          for (std::size_t i = 0; i < comp[aidx].size() && !st.violated(); i += sa) {
            for (std::size_t j = 0; j < comp[bidx].size(); j += sb) {
              bool broke = false;
              for (double t : ts) {
                if (check_triple(comp[aidx][i], comp[bidx][j], 0.0, t, 1.0)) {
                  broke = true;
                  break;
                }
              }
              if (broke) break;
            }
          }
        }
      }
    }
  }

  ConvexityVerdict out;
  out.samples_used = st.samples_used;
  if (st.violated()) {
    out.kind = ConvexityVerdict::Kind::neither;
    out.counterexample = st.ce;
  } else {
    out.kind = ConvexityVerdict::Kind::convex;
  }
  return out;
}

namespace {

struct LadderOutcome {
  bool pass = false;
  bool all_vacuous = false;
  long samples = 0;
};

template <typename ProbeOne>
LadderOutcome run_ladder(double q, double hi, int probe_levels, ProbeOne&& probe_one) {
  LadderOutcome out;
  out.all_vacuous = true;
  const int levels = (hi > q && probe_levels > 0) ? probe_levels : 0;
  for (int k = 0; k <= levels; ++k) {
    const double r = levels == 0 ? q : q + k * (hi - q) / levels;
    const ConvexityVerdict v = probe_one(r);
    out.samples += v.samples_used;
    if (!v.vacuous) out.all_vacuous = false;
    if (!v.ok()) {
      out.pass = false;
      return out;
    }
  }
  out.pass = true;
  return out;
}

template <typename ProbeOne>
BisectResult bisect_threshold(std::pair<double, double> bracket, double bisect_tol,
                              int probe_levels, const char* what, ProbeOne&& probe_one) {
  double lo = bracket.first;
  double hi = bracket.second;
  if (!(std::isfinite(lo) && std::isfinite(hi)) || !(lo < hi))
    throw std::invalid_argument(std::string(what) + ": bracket must satisfy lo < hi");
  if (!(bisect_tol > 0.0)) throw std::invalid_argument(std::string(what) + ": bisect_tol > 0");

  BisectResult res;
  auto probe = [&](double q) {
    ++res.probe_calls;
    const LadderOutcome o = run_ladder(q, hi, probe_levels, probe_one);
    res.samples_used += o.samples;
    return o;
  };

  const LadderOutcome at_lo = probe(lo);
  if (at_lo.all_vacuous)
    throw BracketError(std::string(what) +
                       ": probe inconclusive, every probed sublevel is empty in the window");
  if (at_lo.pass) {
    res.lo = lo;
    res.hi = lo;
    res.at_or_below_lo = true;
    return res;
  }
  if (!probe(hi).pass)
    throw BracketError(std::string(what) + ": the hi end fails the probe; widen the bracket");

  while (hi - lo > bisect_tol && res.iterations < 200) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid).pass)
      hi = mid;
    else
      lo = mid;
    ++res.iterations;
  }
  res.lo = lo;
  res.hi = hi;
  return res;
}

}  // namespace

BisectResult estimate_sql(const ScalarField2& field, std::pair<double, double> bracket,
                          const GridSpec& grid, double bisect_tol, const BisectOptions& opts) {
  grid.validate();
  FieldRaster local;
  ProbeOptions popts = opts.probe;
  if (popts.cache == nullptr) {
    local = FieldRaster::build(field, grid, opts.probe.workers);
    popts.cache = &local;
  }
  return bisect_threshold(bracket, bisect_tol, opts.probe_levels, "estimate_sql",
                          [&](double r) {
                            return sublevel_convex(field, r, grid, opts.pair_samples,
                                                   opts.seg_samples, popts);
                          });
}

BisectResult estimate_scl(const ScalarField2& field, std::pair<double, double> bracket,
                          const GridSpec& grid, double bisect_tol, const BisectOptions& opts) {
  grid.validate();
  FieldRaster local;
  ProbeOptions popts = opts.probe;
  if (popts.cache == nullptr) {
    local = FieldRaster::build(field, grid, opts.probe.workers);
    popts.cache = &local;
  }
  return bisect_threshold(bracket, bisect_tol, opts.probe_levels, "estimate_scl",
                          [&](double q) {
                            return truncation_convex(field, q, grid, opts.pair_samples,
                                                     opts.seg_samples, popts);
                          });
}

Subdifferential subdifferential_of_truncation(const ScalarField2& field, double q, Point2 p,
                                              double tol) {
  if (!std::isfinite(q)) throw std::invalid_argument("subdifferential_of_truncation: q finite");
  if (!is_finite(p)) throw std::invalid_argument("subdifferential_of_truncation: p finite");
  if (!(tol >= 0.0)) throw std::invalid_argument("subdifferential_of_truncation: tol >= 0");
  const double v = field.value(p);
  if (v > q + tol) return {SubdiffKind::singleton_grad, field.gradient(p)};
  if (v < q - tol) return {SubdiffKind::singleton_zero, Vec2{0.0, 0.0}};
  return {SubdiffKind::segment_zero_to_grad, field.gradient(p)};
}

}  // namespace trunclev
