// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "trunclev/builtins.hpp"
#include "trunclev/field.hpp"
#include "trunclev/geometry.hpp"
#include "trunclev/rng.hpp"

namespace trunclev::testing {

inline Point2 random_point(Rng& rng, double lo, double hi) {
  return {rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

inline bool approx(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

inline bool approx_rel(double a, double b, double rel) {
  return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

/// All builtin analytic fields, for property sweeps.
inline std::vector<std::pair<const char*, FieldPtr>> analytic_builtins() {
  return {
      {"cassini a=1", cassini_field({1.0})},
      {"cassini a=2", cassini_field({2.0})},
      {"cassini-g b=1", g_field(1.0)},
      {"quadratic", quadratic_field()},
      {"saddle", saddle_field()},
      {"exp-sum", exp_sum_field()},
  };
}

}  // namespace trunclev::testing
