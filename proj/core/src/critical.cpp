// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#include "trunclev/critical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trunclev/parallel.hpp"

namespace trunclev {

MorseIndexResult morse_index(const ScalarField2& field, Point2 p, double degen_tol) {
  if (!is_finite(p)) throw std::invalid_argument("morse_index: non-finite point");
  const SymMat2 h = field.hessian(p);
  const double scale = std::max(h.frobenius_sq(), 1e-300);
  if (std::fabs(h.det()) <= degen_tol * scale) return {-1, true};
  const auto [lo, hi] = h.eigenvalues();
  int idx = 0;
  if (lo < 0.0) ++idx;
  if (hi < 0.0) ++idx;
  return {idx, false};
}

namespace {

struct NewtonOutcome {
  bool converged = false;
  Point2 location;
  double grad_norm = 0.0;
};

NewtonOutcome newton_from(const ScalarField2& field, const GridSpec& grid, Point2 seed,
                          double newton_tol, int max_iters) {
  // Iterates are allowed to roam slightly outside the window before being
  // discarded, so roots near the boundary are still reachable.
  const double slack = 0.1 * grid.window_diag();
  const double max_step = 0.25 * grid.window_diag();

  Point2 p = seed;
  for (int it = 0; it < max_iters; ++it) {
    const Vec2 g = field.gradient(p);
    const double gn = g.norm();
    if (gn <= newton_tol) return {true, p, gn};
    const SymMat2 h = field.hessian(p);
    const double det = h.det();
    Vec2 step;
    if (std::fabs(det) > 1e-14 * std::max(1.0, h.frobenius_sq())) {
      // Solve H step = -g.
      step.x = (-g.x * h.a22 + g.y * h.a12) / det;
      step.y = (-h.a11 * g.y + h.a12 * g.x) / det;
    } else {
      // Damped descent on |grad|^2 / 2; its gradient is H g.
      Vec2 d = h.apply(g);
      double dn = d.norm();
      if (!(dn > 0.0)) return {false, p, gn};
      double t = grid.cell_diag();
      Point2 cand = p - (t / dn) * d;
      int back = 0;
      while (back < 20 && field.gradient(cand).norm_sq() >= gn * gn) {
        t *= 0.5;
        cand = p - (t / dn) * d;
        ++back;
      }
      if (back == 20) return {false, p, gn};
      p = cand;
      continue;
    }
    const double sn = step.norm();
    if (!std::isfinite(sn)) return {false, p, gn};
    if (sn > max_step) step = (max_step / sn) * step;
    p = p + step;
    if (p.x < grid.x_min - slack || p.x > grid.x_max + slack || p.y < grid.y_min - slack ||
        p.y > grid.y_max + slack)
      return {false, p, gn};
  }
  const double gn = field.gradient(p).norm();
  return {gn <= newton_tol, p, gn};
}

}  // namespace

CriticalSetReport find_critical_points(const ScalarField2& field, const GridSpec& grid,
                                       double newton_tol, int max_iters,
                                       const CriticalSearchOptions& opts) {
  grid.validate();
  if (!(newton_tol > 0.0)) throw std::invalid_argument("find_critical_points: newton_tol > 0");
  const int nx = grid.nx, ny = grid.ny;
  const std::size_t n = static_cast<std::size_t>(nx) * ny;

  std::vector<double> gnorm(n);
  parallel_for(n, opts.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const int i = static_cast<int>(k % nx);
      const int j = static_cast<int>(k / nx);
      gnorm[k] = field.gradient(grid.cell_center(i, j)).norm();
    }
  });

  std::vector<double> sorted(gnorm);
  const std::size_t qidx = std::min(
      n - 1, static_cast<std::size_t>(opts.seed_fraction * static_cast<double>(n)));
  std::nth_element(sorted.begin(), sorted.begin() + qidx, sorted.end());
  const double threshold = sorted[qidx];

  std::vector<std::size_t> seeds;
  for (std::size_t k = 0; k < n; ++k) {
    const int i = static_cast<int>(k % nx);
    const int j = static_cast<int>(k / nx);
    bool strict_min = true;
    for (int dj = -1; dj <= 1 && strict_min; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0) continue;
        const int ii = i + di, jj = j + dj;
        if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) continue;
        if (gnorm[static_cast<std::size_t>(jj) * nx + ii] <= gnorm[k]) {
          strict_min = false;
          break;
        }
      }
    }
    if (strict_min || gnorm[k] <= threshold) seeds.push_back(k);
  }

  std::vector<NewtonOutcome> outcomes(seeds.size());
  parallel_for(seeds.size(), opts.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const int i = static_cast<int>(seeds[s] % nx);
      const int j = static_cast<int>(seeds[s] / nx);
      outcomes[s] =
          newton_from(field, grid, grid.cell_center(i, j), newton_tol, max_iters);
    }
  });

  std::vector<NewtonOutcome> converged;
  int discarded = 0;
  for (const auto& o : outcomes) {
    if (o.converged && grid.contains(o.location))
      converged.push_back(o);
    else
      ++discarded;
  }
  std::sort(converged.begin(), converged.end(), [](const NewtonOutcome& a, const NewtonOutcome& b) {
    if (a.location.x != b.location.x) return a.location.x < b.location.x;
    if (a.location.y != b.location.y) return a.location.y < b.location.y;
    return a.grad_norm < b.grad_norm;
  });

  const double dedup =
      opts.dedup_radius > 0.0 ? opts.dedup_radius : 2.0 * grid.cell_diag();
  std::vector<NewtonOutcome> reps;
  for (const auto& o : converged) {
    bool merged = false;
    for (auto& r : reps) {
      if (distance(r.location, o.location) < dedup) {
        if (o.grad_norm < r.grad_norm) r = o;  // keep the tighter root
        merged = true;
        break;
      }
    }
    if (!merged) reps.push_back(o);
  }
  std::sort(reps.begin(), reps.end(), [](const NewtonOutcome& a, const NewtonOutcome& b) {
    if (a.location.x != b.location.x) return a.location.x < b.location.x;
    return a.location.y < b.location.y;
  });

  CriticalSetReport report;
  report.window = grid;
  report.seeds_used = static_cast<int>(seeds.size());
  report.seeds_discarded = discarded;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : reps) {
    CriticalPoint cp;
    cp.location = r.location;
    cp.value = field.value(r.location);
    cp.grad_norm = r.grad_norm;
    const MorseIndexResult mi = morse_index(field, r.location, opts.degen_tol);
    cp.morse_index = mi.degenerate ? -1 : mi.index;
    cp.degenerate = mi.degenerate;
    cp.in_hess_plus = is_positive_definite(field.hessian(r.location), 0.0);
    best = std::max(best, cp.value);
    report.points.push_back(cp);
  }
  report.empty = report.points.empty();
  report.nu_max = report.empty ? -std::numeric_limits<double>::infinity() : best;
  return report;
}

double nu_max(const CriticalSetReport& report) { return report.nu_max; }

}  // namespace trunclev
