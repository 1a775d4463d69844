// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <limits>

#include "test_helpers.hpp"
#include "trunclev/field.hpp"

using namespace trunclev;
using namespace trunclev::testing;

TEST_CASE("positive definiteness by Sylvester minors") {
  CHECK(is_positive_definite({1.0, 0.0, 1.0}, 0.0));

  // Hessians of the Cassini builtin at (0,0) and (1,0); frozen after
  // cross-checking against central differences below.
  const SymMat2 origin{-4.0, 0.0, 4.0};
  const SymMat2 minimum{8.0, 0.0, 8.0};
  CHECK_FALSE(is_positive_definite(origin, 0.0));
  CHECK(is_positive_definite(minimum, 0.0));

  const FieldPtr f = cassini_field({1.0});
  const SymMat2 h0 = f->hessian({0.0, 0.0});
  CHECK(h0.a11 == doctest::Approx(origin.a11));
  CHECK(h0.a12 == doctest::Approx(origin.a12));
  CHECK(h0.a22 == doctest::Approx(origin.a22));
  const SymMat2 h1 = f->hessian({1.0, 0.0});
  CHECK(h1.a11 == doctest::Approx(minimum.a11));
  CHECK(h1.a22 == doctest::Approx(minimum.a22));
  const SymMat2 h0_fd = fd_hessian([&](Point2 p) { return f->value(p); }, {0.0, 0.0}, 1e-4);
  CHECK(approx(h0_fd.a11, -4.0, 1e-3));
  CHECK(approx(h0_fd.a22, 4.0, 1e-3));
}

TEST_CASE("positive semidefiniteness") {
  CHECK(is_positive_semidefinite({0.0, 0.0, 0.0}, 0.0));
  CHECK(is_positive_semidefinite({8.0, 0.0, 8.0}, 0.0));
  CHECK_FALSE(is_positive_semidefinite({-4.0, 0.0, 4.0}, 0.0));
  // a11 = 0 with a nonzero off-diagonal is not PSD.
  CHECK_FALSE(is_positive_semidefinite({0.0, 1.0, 4.0}, 0.0));
}

TEST_CASE("matrix predicates reject bad input") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(is_positive_definite({nan, 0.0, 1.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(is_positive_semidefinite({1.0, nan, 1.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(is_positive_definite({1.0, 0.0, 1.0}, -1.0), std::invalid_argument);
}

TEST_CASE("PD implies PSD and is scale invariant at eps 0") {
  Rng rng(41);
  int pd_count = 0;
  for (int k = 0; k < 2000; ++k) {
    const SymMat2 m{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const bool pd = is_positive_definite(m, 0.0);
    if (pd) {
      ++pd_count;
      CHECK(is_positive_semidefinite(m, 0.0));
    }
    for (double t : {0.25, 3.0, 1e4}) {
      const SymMat2 tm{t * m.a11, t * m.a12, t * m.a22};
      CHECK(is_positive_definite(tm, 0.0) == pd);
    }
  }
  CHECK(pd_count > 100);  // the generator actually exercises both branches
}

TEST_CASE("derivative checker on the builtin quadratic") {
  const FieldPtr f = quadratic_field();
  const auto [grad_err, hess_err] = check_derivatives(*f, {0.3, -0.7}, 1e-4);
  CHECK(grad_err < 1e-6);
  CHECK(hess_err < 1e-4);
}

TEST_CASE("derivative checker on the Cassini quartic") {
  const FieldPtr f = cassini_field({1.0});
  const auto [grad_err, hess_err] = check_derivatives(*f, {0.5, 0.5}, 1e-4);
  CHECK(grad_err < 1e-5);
  CHECK(hess_err < 1e-3);

  // (a, 0) is a global minimum; the analytic gradient vanishes there.
  const Vec2 g = f->gradient({1.0, 0.0});
  CHECK(g.norm() < 1e-8);
}

TEST_CASE("analytic derivatives match central differences on random points") {
  for (const auto& [name, field] : analytic_builtins()) {
    CAPTURE(name);
    Rng rng = Rng::stream(2026, name);
    for (int k = 0; k < 100; ++k) {
      const Point2 p = random_point(rng, -3.0, 3.0);
      const auto [grad_err, hess_err] = check_derivatives(*field, p, 1e-4);
      const double gn = field->gradient(p).norm();
      const double hn = std::sqrt(field->hessian(p).frobenius_sq());
      CHECK(grad_err <= 1e-4 * (1.0 + gn));
      CHECK(hess_err <= 1e-2 * (1.0 + hn));
    }
  }
}

TEST_CASE("check_derivatives validates input") {
  const FieldPtr f = quadratic_field();
  CHECK_THROWS_AS(check_derivatives(*f, {0.0, 0.0}, 0.0), std::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(check_derivatives(*f, {inf, 0.0}, 1e-4), std::invalid_argument);
}

TEST_CASE("polynomial field reproduces the Cassini quartic exactly") {
  // (x^2+y^2)^2 - 2(x^2-y^2) = x^4 + 2 x^2 y^2 + y^4 - 2 x^2 + 2 y^2.
  const FieldPtr poly = make_polynomial({{4, 0, 1.0},
                                         {2, 2, 2.0},
                                         {0, 4, 1.0},
                                         {2, 0, -2.0},
                                         {0, 2, 2.0}});
  const FieldPtr ref = cassini_field({1.0});
  Rng rng(7);
  for (int k = 0; k < 200; ++k) {
    const Point2 p = random_point(rng, -2.0, 2.0);
    CHECK(approx_rel(poly->value(p), ref->value(p), 1e-13));
    const Vec2 gp = poly->gradient(p);
    const Vec2 gr = ref->gradient(p);
    CHECK(approx_rel(gp.x, gr.x, 1e-13));
    CHECK(approx_rel(gp.y, gr.y, 1e-13));
    const SymMat2 hp = poly->hessian(p);
    const SymMat2 hr = ref->hessian(p);
    CHECK(approx_rel(hp.a11, hr.a11, 1e-13));
    CHECK(approx_rel(hp.a12, hr.a12, 1e-13));
    CHECK(approx_rel(hp.a22, hr.a22, 1e-13));
  }
  CHECK(poly->derivative_mode() == DerivativeMode::analytic);
  CHECK_THROWS_AS(make_polynomial({{-1, 0, 1.0}}), std::invalid_argument);
}

TEST_CASE("finite-difference field wraps a black-box value") {
  const FieldPtr ref = cassini_field({1.0});
  const FiniteDifferenceField fd([ref](Point2 p) { return ref->value(p); }, 1e-5);
  CHECK(fd.derivative_mode() == DerivativeMode::finite_difference);
  const Point2 p{0.7, -0.4};
  CHECK(approx((fd.gradient(p) - ref->gradient(p)).norm(), 0.0, 1e-6));
  CHECK(approx(fd.hessian(p).a11, ref->hessian(p).a11, 1e-4));
  CHECK_THROWS_AS(FiniteDifferenceField([](Point2) { return 0.0; }, 0.0),
                  std::invalid_argument);
}

TEST_CASE("grid validation and cell geometry") {
  GridSpec g{-1.0, 1.0, -2.0, 2.0, 4, 8};
  g.validate();
  CHECK(g.dx() == doctest::Approx(0.5));
  CHECK(g.dy() == doctest::Approx(0.5));
  const Point2 c = g.cell_center(0, 0);
  CHECK(c.x == doctest::Approx(-0.75));
  CHECK(c.y == doctest::Approx(-1.75));
  const auto cell = g.cell_of({0.9, 1.9});
  REQUIRE(cell.has_value());
  CHECK(cell->first == 3);
  CHECK(cell->second == 7);
  CHECK_FALSE(g.cell_of({1.5, 0.0}).has_value());

  GridSpec bad = g;
  bad.nx = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.x_min = 2.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
