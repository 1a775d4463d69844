// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#include "trunclev/gradient_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "trunclev/builtins.hpp"
#include "trunclev/level_curve.hpp"
#include "trunclev/parallel.hpp"
#include "trunclev/rng.hpp"

namespace trunclev {

namespace {

inline std::uint64_t bucket_key(double gx, double gy, double side) {
  const auto kx = static_cast<std::int64_t>(std::floor(gx / side));
  const auto ky = static_cast<std::int64_t>(std::floor(gy / side));
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(kx)) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(ky));
}

struct Candidate {
  double image_dist;
  int i;
  int j;
};

// Solve the 4x4 linear system in place; returns false when singular.
bool solve4(double A[4][5]) {
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    if (std::fabs(A[piv][col]) < 1e-300) return false;
    if (piv != col)
      for (int c = col; c < 5; ++c) std::swap(A[piv][c], A[col][c]);
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double m = A[r][col] / A[col][col];
      for (int c = col; c < 5; ++c) A[r][c] -= m * A[col][c];
    }
  }
  for (int r = 0; r < 4; ++r) A[r][4] /= A[r][r];
  return true;
}

struct PolishResult {
  bool ok = false;
  Point2 p1, p2;
  double image_residual = 0.0;
};

// Two-point Newton on [grad f(p1) - grad f(p2) = 0, f(p1) = f(p2) = c*],
// with c* frozen from the candidate pair.
PolishResult polish_pair(const ScalarField2& field, Point2 p1, Point2 p2, int iters,
                         double step_cap) {
  const double cstar = 0.5 * (field.value(p1) + field.value(p2));
  PolishResult best;
  best.p1 = p1;
  best.p2 = p2;
  best.image_residual = (field.gradient(p1) - field.gradient(p2)).norm();
  for (int it = 0; it < iters; ++it) {
    const Vec2 g1 = field.gradient(p1);
    const Vec2 g2 = field.gradient(p2);
    const SymMat2 h1 = field.hessian(p1);
    const SymMat2 h2 = field.hessian(p2);
    const double r0 = g1.x - g2.x;
    const double r1 = g1.y - g2.y;
    const double r2 = field.value(p1) - cstar;
    const double r3 = field.value(p2) - cstar;
    double A[4][5] = {
        {h1.a11, h1.a12, -h2.a11, -h2.a12, -r0},
        {h1.a12, h1.a22, -h2.a12, -h2.a22, -r1},
        {g1.x, g1.y, 0.0, 0.0, -r2},
        {0.0, 0.0, g2.x, g2.y, -r3},
    };
    if (!solve4(A)) break;
    double dx1 = A[0][4], dy1 = A[1][4], dx2 = A[2][4], dy2 = A[3][4];
    const double sn = std::sqrt(dx1 * dx1 + dy1 * dy1 + dx2 * dx2 + dy2 * dy2);
    if (!std::isfinite(sn)) break;
    if (sn > step_cap) {
      const double sc = step_cap / sn;
      dx1 *= sc; dy1 *= sc; dx2 *= sc; dy2 *= sc;
    }
    p1 = {p1.x + dx1, p1.y + dy1};
    p2 = {p2.x + dx2, p2.y + dy2};
    const double res = (field.gradient(p1) - field.gradient(p2)).norm();
    if (res < best.image_residual) {
      best.p1 = p1;
      best.p2 = p2;
      best.image_residual = res;
    }
    if (res < 1e-13 * (1.0 + field.gradient(p1).norm())) break;
  }
  best.ok = true;
  return best;
}

Point2 normalize_first(Point2 a, Point2 b, bool& swapped) {
  swapped = (b.x < a.x) || (b.x == a.x && b.y < a.y);
  return swapped ? b : a;
}

}  // namespace

InjectivityReport gradient_collision_scan(const ScalarField2& field, const RegionMask& region,
                                          long samples, double image_tol,
                                          double min_separation, const ScanOptions& opts) {
  if (!(image_tol > 0.0)) throw std::invalid_argument("gradient_collision_scan: image_tol > 0");
  if (samples < 2) throw std::invalid_argument("gradient_collision_scan: samples >= 2");
  if (!(min_separation >= 0.0))
    throw std::invalid_argument("gradient_collision_scan: min_separation >= 0");

  const GridSpec& grid = region.grid;
  std::vector<std::size_t> true_cells;
  for (std::size_t k = 0; k < region.cells.size(); ++k)
    if (region.cells[k]) true_cells.push_back(k);
  if (true_cells.empty())
    throw std::invalid_argument("gradient_collision_scan: the region has no true cell");

  InjectivityReport report;
  report.region_tag = to_string(region.tag);
  report.samples = samples;

  // Sample points are drawn sequentially from one stream, then evaluated in
  // parallel, so results do not depend on the worker count.
  Rng rng = Rng::stream(opts.seed, "gradient-scan");
  std::vector<Point2> pts(static_cast<std::size_t>(samples));
  const double dx = grid.dx(), dy = grid.dy();
  for (auto& p : pts) {
    const std::size_t k = true_cells[rng.below(true_cells.size())];
    const int i = static_cast<int>(k % grid.nx);
    const int j = static_cast<int>(k / grid.nx);
    const Point2 c = grid.cell_center(i, j);
    p = {c.x + (rng.uniform01() - 0.5) * dx, c.y + (rng.uniform01() - 0.5) * dy};
  }
  std::vector<Vec2> grads(pts.size());
  parallel_for(pts.size(), opts.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) grads[k] = field.gradient(pts[k]);
  });

  // Raw hash multiplicity at the base bucket side: spatially separated
  // clusters of samples sharing one image bucket.
  int multiplicity = 1;
  {
    std::unordered_map<std::uint64_t, std::vector<int>> hash;
    hash.reserve(pts.size() * 2);
    for (int i = 0; i < static_cast<int>(pts.size()); ++i)
      hash[bucket_key(grads[i].x, grads[i].y, image_tol)].push_back(i);
    for (const auto& [key, members] : hash) {
      (void)key;
      if (members.size() < 2) continue;
      std::vector<Point2> reps;
      for (int idx : members) {
        bool fresh = true;
        for (const Point2& r : reps) {
          if (distance(r, pts[idx]) < min_separation) {
            fresh = false;
            break;
          }
        }
        if (fresh) reps.push_back(pts[idx]);
        if (reps.size() >= 8) break;
      }
      multiplicity = std::max(multiplicity, static_cast<int>(reps.size()));
    }
  }

  double gx_min = std::numeric_limits<double>::infinity(), gx_max = -gx_min;
  double gy_min = gx_min, gy_max = -gx_min;
  for (const Vec2& g : grads) {
    gx_min = std::min(gx_min, g.x);
    gx_max = std::max(gx_max, g.x);
    gy_min = std::min(gy_min, g.y);
    gy_max = std::max(gy_max, g.y);
  }
  const double image_extent = std::max(gx_max - gx_min, gy_max - gy_min);
  const double capture_cap = std::max(image_tol, 0.05 * image_extent);
  const double polish_step_cap = 0.25 * grid.window_diag();

  std::vector<CollisionPair> accepted;
  double capture = image_tol;
  for (int tier = 0; tier <= opts.max_escalations; ++tier, capture *= 2.0) {
    if (tier > 0 && capture > capture_cap) break;

    std::unordered_map<std::uint64_t, std::vector<int>> hash;
    hash.reserve(pts.size() * 2);
    for (int i = 0; i < static_cast<int>(pts.size()); ++i)
      hash[bucket_key(grads[i].x, grads[i].y, capture)].push_back(i);

    std::vector<Candidate> candidates;
    long checks = 0;
    for (int i = 0; i < static_cast<int>(pts.size()) && checks <= opts.max_pair_checks; ++i) {
      const auto kx = static_cast<std::int64_t>(std::floor(grads[i].x / capture));
      const auto ky = static_cast<std::int64_t>(std::floor(grads[i].y / capture));
      for (int ddx = -1; ddx <= 1; ++ddx) {
        for (int ddy = -1; ddy <= 1; ++ddy) {
          const std::uint64_t key =
              (static_cast<std::uint64_t>(static_cast<std::uint32_t>(kx + ddx)) << 32) |
              static_cast<std::uint64_t>(static_cast<std::uint32_t>(ky + ddy));
          const auto it = hash.find(key);
          if (it == hash.end()) continue;
          for (int j : it->second) {
            if (j <= i) continue;
            ++checks;
            if (checks > opts.max_pair_checks) break;
            const double img = (grads[i] - grads[j]).norm();
            if (img > capture) continue;
            if (distance(pts[i], pts[j]) < min_separation) continue;
            candidates.push_back({img, i, j});
          }
        }
      }
    }
    report.candidates_checked += checks;
    if (candidates.empty()) continue;

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.image_dist != b.image_dist) return a.image_dist < b.image_dist;
      if (a.i != b.i) return a.i < b.i;
      return a.j < b.j;
    });
    if (static_cast<int>(candidates.size()) > opts.polish_budget)
      candidates.resize(opts.polish_budget);

    for (const Candidate& cand : candidates) {
      PolishResult pr =
          polish_pair(field, pts[cand.i], pts[cand.j], opts.polish_iters, polish_step_cap);
      if (!pr.ok) continue;
      const Vec2 g1 = field.gradient(pr.p1);
      const Vec2 g2 = field.gradient(pr.p2);
      const double residual = (g1 - g2).norm();
      const double imgnorm = 0.5 * (g1 + g2).norm();
      // Accept only genuine collisions: tight residual, separated, in-region.
      if (residual > std::min(image_tol, 1e-7 * (1.0 + imgnorm))) continue;
      const double sep = distance(pr.p1, pr.p2);
      if (sep < min_separation) continue;
      if (!region.contains_point(pr.p1) || !region.contains_point(pr.p2)) continue;

      bool swapped = false;
      const Point2 first = normalize_first(pr.p1, pr.p2, swapped);
      const Point2 second = swapped ? pr.p1 : pr.p2;
      bool dup = false;
      for (const CollisionPair& c : accepted) {
        if (distance(c.p1, first) < 0.5 * std::max(min_separation, 1e-12) &&
            distance(c.p2, second) < 0.5 * std::max(min_separation, 1e-12)) {
          dup = true;
          break;
        }
      }
      if (dup) continue;

      CollisionPair cp;
      cp.p1 = first;
      cp.p2 = second;
      cp.image = 0.5 * (g1 + g2);
      cp.separation = sep;
      cp.image_tol = image_tol;
      cp.image_residual = residual;
      cp.value_gap = std::fabs(field.value(pr.p1) - field.value(pr.p2));
      accepted.push_back(cp);
      if (static_cast<int>(accepted.size()) >= opts.max_collisions) break;
    }
    report.capture_radius_used = capture;
    if (!accepted.empty()) break;
  }

  std::sort(accepted.begin(), accepted.end(), [](const CollisionPair& a, const CollisionPair& b) {
    if (a.image.x != b.image.x) return a.image.x < b.image.x;
    if (a.image.y != b.image.y) return a.image.y < b.image.y;
    if (a.p1.x != b.p1.x) return a.p1.x < b.p1.x;
    return a.p1.y < b.p1.y;
  });

  // Multiplicity evidence from validated collisions: distinct endpoints
  // sharing one image value.
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    std::vector<Point2> group = {accepted[i].p1, accepted[i].p2};
    for (std::size_t j = 0; j < accepted.size(); ++j) {
      if (j == i) continue;
      if ((accepted[i].image - accepted[j].image).norm() > 4.0 * image_tol) continue;
      for (const Point2& p : {accepted[j].p1, accepted[j].p2}) {
        bool fresh = true;
        for (const Point2& r : group)
          if (distance(r, p) < min_separation) fresh = false;
        if (fresh) group.push_back(p);
      }
    }
    multiplicity = std::max(multiplicity, static_cast<int>(group.size()));
  }

  report.collisions = std::move(accepted);
  report.verdict = report.collisions.empty() ? InjectivityReport::Verdict::no_collision_found
                                             : InjectivityReport::Verdict::collisions_found;
  report.valence_lower_bound = multiplicity;
  return report;
}

KnownCollision known_collision(double a, double c) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("known_collision: a must be positive and finite");
  const double a4 = a * a * a * a;
  if (!(c > -a4 && c < 3.0 * a4))
    throw std::domain_error("known_collision: c must lie strictly in (-a^4, 3 a^4)");

  KnownCollision out;
  const double x = std::sqrt(3.0 * a4 - c) / (2.0 * a);
  const double y = std::sqrt(c + a4) / (2.0 * a);
  out.p1 = {x, y};
  out.p2 = {-x, y};
  out.image = {0.0, 4.0 * a * std::sqrt(c + a4)};
  out.level = c;

  const FieldPtr f = cassini_field({a});
  const Vec2 g1 = f->gradient(out.p1);
  const Vec2 g2 = f->gradient(out.p2);
  const double gscale = 1.0 + out.image.norm();
  const double vscale = 1.0 + std::fabs(c);
  if ((g1 - out.image).norm() > 1e-9 * gscale || (g2 - out.image).norm() > 1e-9 * gscale ||
      std::fabs(f->value(out.p1) - c) > 1e-9 * vscale ||
      std::fabs(f->value(out.p2) - c) > 1e-9 * vscale)
    throw std::logic_error("known_collision: analytic verification failed");
  return out;
}

MonotonicityResult monotonicity_check(const ScalarField2& field, double level,
                                      const GridSpec& grid, long pairs, double mono_tol,
                                      std::uint64_t seed, int workers) {
  grid.validate();
  if (!(mono_tol >= 0.0)) throw std::invalid_argument("monotonicity_check: mono_tol >= 0");

  const std::size_t n = static_cast<std::size_t>(grid.nx) * grid.ny;
  std::vector<double> vals(n);
  std::vector<std::uint8_t> psd(n);
  parallel_for(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const int i = static_cast<int>(k % grid.nx);
      const int j = static_cast<int>(k / grid.nx);
      const Point2 p = grid.cell_center(i, j);
      vals[k] = field.value(p);
      psd[k] = is_positive_semidefinite(field.hessian(p), 0.0) ? 1 : 0;
    }
  });

  std::vector<std::size_t> over, under;
  for (std::size_t k = 0; k < n; ++k) (vals[k] >= level ? over : under).push_back(k);
  if (over.empty())
    throw std::invalid_argument("monotonicity_check: the overlevel set is empty in the window");

  MonotonicityResult res;
  res.worst = std::numeric_limits<double>::infinity();
  auto record = [&](double ip, Point2 x, Point2 y) {
    ++res.pairs_checked;
    if (ip < res.worst) res.worst = ip;
    if (ip < -mono_tol && res.ok) {
      res.ok = false;
      res.witness = std::make_pair(x, y);
    }
  };

  Rng rng = Rng::stream(seed, "monotonicity");
  const double dx = grid.dx(), dy = grid.dy();
  auto draw = [&](const std::vector<std::size_t>& cells, bool want_over) -> Point2 {
    const std::size_t k = cells[rng.below(cells.size())];
    const int i = static_cast<int>(k % grid.nx);
    const int j = static_cast<int>(k / grid.nx);
    const Point2 c = grid.cell_center(i, j);
    const Point2 p{c.x + (rng.uniform01() - 0.5) * dx, c.y + (rng.uniform01() - 0.5) * dy};
    const bool over_p = field.value(p) >= level;
    return over_p == want_over ? p : c;
  };

  for (long s = 0; s < pairs && res.ok; ++s) {
    const Point2 x = draw(over, true);
    const Point2 y = draw(over, true);
    record(dot(field.gradient(x) - field.gradient(y), x - y), x, y);
  }
  if (!under.empty()) {
    for (long s = 0; s < pairs && res.ok; ++s) {
      const Point2 x = draw(over, true);
      const Point2 y = draw(under, false);
      record(dot(field.gradient(x), x - y), x, y);
    }
  }

  // Deterministic pass through indefinite-Hessian cells in the overlevel:
  // short segments along the most negative curvature direction.
  const double h = 0.5 * grid.cell_diag();
  for (std::size_t k = 0; k < n && res.ok; ++k) {
    if (psd[k] || vals[k] < level) continue;
    const int i = static_cast<int>(k % grid.nx);
    const int j = static_cast<int>(k / grid.nx);
    const Point2 c = grid.cell_center(i, j);
    const Vec2 dir = field.hessian(c).min_eigenvector();
    const Point2 x = c + h * dir;
    const Point2 y = c - h * dir;
    if (field.value(x) < level || field.value(y) < level) continue;
    record(dot(field.gradient(x) - field.gradient(y), x - y), x, y);
  }
  return res;
}

ValenceBounds valence_bounds(const ScalarField2& field, const RegionMask& hess_mask,
                             double scl_hi, const CriticalSetReport& critical,
                             long scan_samples, double image_tol, double min_separation,
                             const ScanOptions& opts) {
  ValenceBounds out;
  for (const CriticalPoint& cp : critical.points) {
    if (!cp.degenerate && cp.morse_index == 0 && hess_mask.contains_point(cp.location))
      ++out.index0_in_mask;
  }
  const InjectivityReport scan =
      gradient_collision_scan(field, hess_mask, scan_samples, image_tol, min_separation, opts);
  out.scan_multiplicity = scan.valence_lower_bound;
  out.lo = std::max({1, out.index0_in_mask, out.scan_multiplicity});

  RegionMask trimmed;
  trimmed.grid = hess_mask.grid;
  trimmed.tag = PropertyTag::custom;
  trimmed.cells.assign(hess_mask.cells.size(), 0);
  for (std::size_t k = 0; k < hess_mask.cells.size(); ++k) {
    if (!hess_mask.cells[k]) continue;
    const int i = static_cast<int>(k % hess_mask.grid.nx);
    const int j = static_cast<int>(k / hess_mask.grid.nx);
    if (field.value(hess_mask.grid.cell_center(i, j)) <= scl_hi) trimmed.cells[k] = 1;
  }
  out.components_hess_minus_overlevel = count_components(trimmed);
  out.hi_conjectural = out.components_hess_minus_overlevel + 1;
  out.hi_is_conjectural = true;
  return out;
}

GammaScan gamma_level_scan(double a, double k, double c, const GridSpec* grid) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("gamma_level_scan: a must be positive and finite");
  const double a2 = a * a;
  const double a4 = a2 * a2;
  if (!(k > -a4 && k < 0.0 && c > -a4 && c < 0.0 && k < c))
    throw std::domain_error("gamma_level_scan: need k, c in (-a^4, 0) with k < c");

  GammaScan out;
  out.max_grad_norm_sq_on_gamma_k = 16.0 * a4 * (a2 + std::sqrt(a4 + k));
  out.probe_high = 16.0 * a4 * (a2 + std::sqrt(a4 + c));
  out.probe_low = 16.0 * a4 * (a2 - std::sqrt(a4 + c));

  GridSpec g;
  if (grid) {
    g = *grid;
  } else {
    g = GridSpec{-2.0 * a, 2.0 * a, -2.0 * a, 2.0 * a, 1000, 1000};
  }
  const FieldPtr f = cassini_field({a});
  const LevelCurve curve = level_curve(*f, k, g, {});

  double num_max = 0.0;
  double num_min = std::numeric_limits<double>::infinity();
  bool found = false;
  for (const auto& pl : curve.polylines) {
    bool left = !pl.pts.empty();
    for (const auto& p : pl.pts) {
      if (p.x >= 0.0) {
        left = false;
        break;
      }
    }
    if (!left) continue;
    found = true;
    for (const auto& p : pl.pts) {
      const double gn2 = f->gradient(p).norm_sq();
      num_max = std::max(num_max, gn2);
      num_min = std::min(num_min, gn2);
    }
  }
  if (!found)
    throw std::runtime_error("gamma_level_scan: no left-oval component extracted; widen grid");

  out.numeric_max_on_gamma_k = num_max;
  out.numeric_min_on_gamma_k = num_min;
  out.closed_form_matches =
      std::fabs(num_max - out.max_grad_norm_sq_on_gamma_k) <=
      1e-3 * std::fabs(out.max_grad_norm_sq_on_gamma_k);
  out.two_intersections_expected = out.probe_high > num_max && out.probe_low < num_min;
  return out;
}

}  // namespace trunclev
