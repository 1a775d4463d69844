// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <map>
#include <string>

#include "trunclev/field.hpp"

namespace trunclev {

struct CassiniParams {
  double a = 1.0;  ///< focus parameter, must be > 0 and finite
};

/// The quartic f_a(x, y) = (x^2+y^2)^2 - 2 a^2 (x^2 - y^2) with exact
/// derivatives. Its level curves are Cassini ovals; the zero level is the
/// Bernoulli lemniscate.
FieldPtr cassini_field(const CassiniParams& params);

/// The companion quartic g_b(x, y) = (x^2+y^2)^2 + 2 b^2 (x^2 - y^2).
/// The boundary of the positive-definite-Hessian region of f_a is the
/// level set g_{a/sqrt(3)} = a^4 / 3.
FieldPtr g_field(double b);

/// |x|^2 = x^2 + y^2.
FieldPtr quadratic_field();

/// x^2 - y^2; Hessian indefinite everywhere.
FieldPtr saddle_field();

/// e^{x+y}; convex, infimum 0 not attained.
FieldPtr exp_sum_field();

/// Pointwise max of two fields. The value is exact; derivatives fall back
/// to central differences and are unreliable on the kink set.
FieldPtr max_field(FieldPtr f, FieldPtr g, double fd_step = 1e-6);

FieldPtr make_polynomial(std::vector<Monomial> terms);

/// Registry lookup: "cassini" (param a), "cassini-g" (param b), "quadratic",
/// "saddle", "exp-sum". Throws std::invalid_argument for unknown names or
/// bad parameters.
FieldPtr make_builtin(const std::string& name, const std::map<std::string, double>& params);

/// Closed-form reference values for f_a. This is the only place in the
/// library allowed to hard-code them; every analysis module has to recover
/// these numbers numerically.
struct GroundTruth {
  double min_value;                      ///< -a^4, attained at (+-a, 0)
  std::array<Point2, 3> critical_points; ///< (-a,0), (0,0), (a,0)
  double nu_max;                         ///< 0
  double h_max;                          ///< 3 a^4
  double sql;                            ///< 3 a^4
  double scl;                            ///< 3 a^4
  double hess_boundary_level;            ///< a^4/3, as a level of g_{a/sqrt 3}
  double inflection_abscissa;            ///< a/sqrt(3)
};

GroundTruth ground_truth(const CassiniParams& params);

/// Membership in C^- = {x < 0, -a^4 <= f_a < 0} or C^+ (mirror image).
enum class CRegion { C_minus, C_plus, neither };

CRegion c_plus_minus_membership(const CassiniParams& params, Point2 p);

}  // namespace trunclev
