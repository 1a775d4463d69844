// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trunclev/critical.hpp"
#include "trunclev/field.hpp"
#include "trunclev/raster.hpp"

namespace trunclev {

/// Two distinct points whose gradient images coincide within image_tol,
/// witnessing non-injectivity of the gradient map.
struct CollisionPair {
  Point2 p1;
  Point2 p2;
  Vec2 image;              ///< common gradient value (midpoint of the two images)
  double separation = 0.0; ///< |p1 - p2|
  double image_tol = 0.0;
  double image_residual = 0.0;  ///< |grad f(p1) - grad f(p2)| after polishing
  double value_gap = 0.0;       ///< |f(p1) - f(p2)|
};

struct InjectivityReport {
  enum class Verdict { no_collision_found, collisions_found };

  std::string region_tag;
  long samples = 0;
  std::vector<CollisionPair> collisions;
  Verdict verdict = Verdict::no_collision_found;
  int valence_lower_bound = 1;  ///< max multiplicity seen in the image-space hash
  double capture_radius_used = 0.0;
  long candidates_checked = 0;
};

struct ScanOptions {
  std::uint64_t seed = 99;
  int workers = 1;
  int max_escalations = 14;     ///< candidate capture radius doubles per tier
  int polish_budget = 256;      ///< candidates polished per tier
  int polish_iters = 30;
  long max_pair_checks = 4000000;
  int max_collisions = 64;
};

/// Falsification scan for gradient injectivity on the true cells of region.
///
/// Sample points are hashed by their gradient image into buckets of side
/// image_tol (escalating by factors of two while no candidate survives);
/// spatially separated near-pairs are refined by a two-point Newton polish
/// on [grad f(p1) = grad f(p2), f(p1) = f(p2) = c*]. Only polished pairs
/// that meet the image_tol invariant, stay in the region and keep
/// separation >= min_separation are reported, so the escalation cannot
/// manufacture spurious collisions.
InjectivityReport gradient_collision_scan(const ScalarField2& field, const RegionMask& region,
                                          long samples, double image_tol,
                                          double min_separation, const ScanOptions& opts = {});

struct KnownCollision {
  Point2 p1;
  Point2 p2;
  Vec2 image;
  double level = 0.0;  ///< f value at both points (= c)
};

/// The explicit collision pair of the Cassini gradient at level c:
/// p = (+-sqrt(3a^4-c)/(2a), sqrt(c+a^4)/(2a)), grad f_a(p) = (0, 4a sqrt(c+a^4)).
/// Requires -a^4 < c < 3a^4 strictly so the points are real, distinct and
/// regular; the returned pair is verified analytically to 1e-9 relative at
/// construction.
KnownCollision known_collision(double a, double c);

struct MonotonicityResult {
  bool ok = true;
  double worst = 0.0;  ///< most negative inner product observed
  std::optional<std::pair<Point2, Point2>> witness;
  long pairs_checked = 0;

  explicit operator bool() const { return ok; }
};

/// Monotonicity of grad f on the closed overlevel set {f >= level}:
/// (i) <grad f(x) - grad f(y), x - y> >= -mono_tol for x, y overlevel;
/// (ii) <grad f(x), x - y> >= -mono_tol for x overlevel, y strictly below.
MonotonicityResult monotonicity_check(const ScalarField2& field, double level,
                                      const GridSpec& grid, long pairs, double mono_tol,
                                      std::uint64_t seed = 7, int workers = 1);

struct ValenceBounds {
  int lo = 1;
  int hi_conjectural = 1;  ///< component count + 1; conjectural, never a theorem
  bool hi_is_conjectural = true;
  int components_hess_minus_overlevel = 0;
  int index0_in_mask = 0;
  int scan_multiplicity = 1;
};

/// Numerical valence bounds for grad f restricted to the Hess+ region.
/// lo is evidence (critical points and scan multiplicity); hi is the
/// component count of Hess+ minus the overlevel {f > scl_hi} plus one,
/// reported explicitly as conjectural.
ValenceBounds valence_bounds(const ScalarField2& field, const RegionMask& hess_mask,
                             double scl_hi, const CriticalSetReport& critical,
                             long scan_samples, double image_tol, double min_separation,
                             const ScanOptions& opts = {});

struct GammaScan {
  double max_grad_norm_sq_on_gamma_k = 0.0;  ///< closed form 16 a^4 (a^2 + sqrt(a^4 + k))
  double probe_high = 0.0;                   ///< 16 a^4 (a^2 + sqrt(a^4 + c))
  double probe_low = 0.0;                    ///< 16 a^4 (a^2 - sqrt(a^4 + c))
  double numeric_max_on_gamma_k = 0.0;       ///< max |grad f_a|^2 over the extracted left oval
  double numeric_min_on_gamma_k = 0.0;
  bool closed_form_matches = false;  ///< numeric max within 1e-3 relative of the closed form
  bool two_intersections_expected = false;
};

/// Closed-form probes for the left-oval level curve Gamma_k of f_a together
/// with a numerical cross-check against the extracted curve.
/// Requires k, c in (-a^4, 0) and k < c.
GammaScan gamma_level_scan(double a, double k, double c, const GridSpec* grid = nullptr);

}  // namespace trunclev
