// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#include "trunclev/field.hpp"

#include <cmath>
#include <stdexcept>

namespace trunclev {

namespace {

// Integer power by repeated multiplication; bit-reproducible, unlike pow().
double ipow(double x, int n) {
  double r = 1.0;
  double b = x;
  for (int e = n; e > 0; e >>= 1) {
    if (e & 1) r *= b;
    b *= b;
  }
  return r;
}

}  // namespace

Vec2 fd_gradient(const std::function<double(Point2)>& f, Point2 p, double h) {
  const double gx = (f({p.x + h, p.y}) - f({p.x - h, p.y})) / (2.0 * h);
  const double gy = (f({p.x, p.y + h}) - f({p.x, p.y - h})) / (2.0 * h);
  return {gx, gy};
}

SymMat2 fd_hessian(const std::function<double(Point2)>& f, Point2 p, double h) {
  const double c = f(p);
  const double xp = f({p.x + h, p.y});
  const double xm = f({p.x - h, p.y});
  const double yp = f({p.x, p.y + h});
  const double ym = f({p.x, p.y - h});
  const double pp = f({p.x + h, p.y + h});
  const double pm = f({p.x + h, p.y - h});
  const double mp = f({p.x - h, p.y + h});
  const double mm = f({p.x - h, p.y - h});
  SymMat2 m;
  m.a11 = (xp - 2.0 * c + xm) / (h * h);
  m.a22 = (yp - 2.0 * c + ym) / (h * h);
  m.a12 = (pp - pm - mp + mm) / (4.0 * h * h);
  return m;
}

FiniteDifferenceField::FiniteDifferenceField(std::function<double(Point2)> v, double step)
    : value_(std::move(v)), step_(step) {
  if (!(step > 0.0) || !std::isfinite(step))
    throw std::invalid_argument("FiniteDifferenceField: step must be positive and finite");
}

Vec2 FiniteDifferenceField::gradient(Point2 p) const { return fd_gradient(value_, p, step_); }

SymMat2 FiniteDifferenceField::hessian(Point2 p) const { return fd_hessian(value_, p, step_); }

PolynomialField::PolynomialField(std::vector<Monomial> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.i < 0 || t.j < 0)
      throw std::invalid_argument("PolynomialField: exponents must be non-negative");
    if (!std::isfinite(t.c))
      throw std::invalid_argument("PolynomialField: non-finite coefficient");
  }
}

double PolynomialField::value(Point2 p) const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.c * ipow(p.x, t.i) * ipow(p.y, t.j);
  return s;
}

Vec2 PolynomialField::gradient(Point2 p) const {
  Vec2 g;
  for (const auto& t : terms_) {
    if (t.i > 0) g.x += t.c * t.i * ipow(p.x, t.i - 1) * ipow(p.y, t.j);
    if (t.j > 0) g.y += t.c * t.j * ipow(p.x, t.i) * ipow(p.y, t.j - 1);
  }
  return g;
}

SymMat2 PolynomialField::hessian(Point2 p) const {
  SymMat2 m;
  for (const auto& t : terms_) {
    if (t.i > 1) m.a11 += t.c * t.i * (t.i - 1) * ipow(p.x, t.i - 2) * ipow(p.y, t.j);
    if (t.j > 1) m.a22 += t.c * t.j * (t.j - 1) * ipow(p.x, t.i) * ipow(p.y, t.j - 2);
    if (t.i > 0 && t.j > 0)
      m.a12 += t.c * t.i * t.j * ipow(p.x, t.i - 1) * ipow(p.y, t.j - 1);
  }
  return m;
}

DerivativeCheck check_derivatives(const ScalarField2& field, Point2 p, double h) {
  if (!is_finite(p)) throw std::invalid_argument("check_derivatives: non-finite point");
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("check_derivatives: h must be positive and finite");

  const auto f = [&field](Point2 q) { return field.value(q); };
  const Vec2 g_fd = fd_gradient(f, p, h);
  const SymMat2 h_fd = fd_hessian(f, p, h);
  const Vec2 g = field.gradient(p);
  const SymMat2 m = field.hessian(p);

  DerivativeCheck out;
  out.grad_err = std::max(std::fabs(g.x - g_fd.x), std::fabs(g.y - g_fd.y));
  out.hess_err = std::max({std::fabs(m.a11 - h_fd.a11), std::fabs(m.a12 - h_fd.a12),
                           std::fabs(m.a22 - h_fd.a22)});
  return out;
}

}  // namespace trunclev
