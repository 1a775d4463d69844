// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#include "trunclev/builtins.hpp"

#include <cmath>
#include <stdexcept>

namespace trunclev {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

class CassiniField final : public ScalarField2 {
 public:
  explicit CassiniField(double a) : a2_(a * a) {}

  double value(Point2 p) const override {
    const double s = p.x * p.x + p.y * p.y;
    return s * s - 2.0 * a2_ * (p.x * p.x - p.y * p.y);
  }
  Vec2 gradient(Point2 p) const override {
    const double s = p.x * p.x + p.y * p.y;
    return {4.0 * p.x * (s - a2_), 4.0 * p.y * (s + a2_)};
  }
  SymMat2 hessian(Point2 p) const override {
    return {12.0 * p.x * p.x + 4.0 * p.y * p.y - 4.0 * a2_, 8.0 * p.x * p.y,
            4.0 * p.x * p.x + 12.0 * p.y * p.y + 4.0 * a2_};
  }
  DerivativeMode derivative_mode() const override { return DerivativeMode::analytic; }

 private:
  double a2_;
};

// g_b is the 90-degree rotation of f_b (sign of the x^2 - y^2 term flipped).
class GCompanionField final : public ScalarField2 {
 public:
  explicit GCompanionField(double b) : b2_(b * b) {}

  double value(Point2 p) const override {
    const double s = p.x * p.x + p.y * p.y;
    return s * s + 2.0 * b2_ * (p.x * p.x - p.y * p.y);
  }
  Vec2 gradient(Point2 p) const override {
    const double s = p.x * p.x + p.y * p.y;
    return {4.0 * p.x * (s + b2_), 4.0 * p.y * (s - b2_)};
  }
  SymMat2 hessian(Point2 p) const override {
    return {12.0 * p.x * p.x + 4.0 * p.y * p.y + 4.0 * b2_, 8.0 * p.x * p.y,
            4.0 * p.x * p.x + 12.0 * p.y * p.y - 4.0 * b2_};
  }
  DerivativeMode derivative_mode() const override { return DerivativeMode::analytic; }

 private:
  double b2_;
};

class QuadraticField final : public ScalarField2 {
 public:
  double value(Point2 p) const override { return p.x * p.x + p.y * p.y; }
  Vec2 gradient(Point2 p) const override { return {2.0 * p.x, 2.0 * p.y}; }
  SymMat2 hessian(Point2) const override { return {2.0, 0.0, 2.0}; }
  DerivativeMode derivative_mode() const override { return DerivativeMode::analytic; }
};

class SaddleField final : public ScalarField2 {
 public:
  double value(Point2 p) const override { return p.x * p.x - p.y * p.y; }
  Vec2 gradient(Point2 p) const override { return {2.0 * p.x, -2.0 * p.y}; }
  SymMat2 hessian(Point2) const override { return {2.0, 0.0, -2.0}; }
  DerivativeMode derivative_mode() const override { return DerivativeMode::analytic; }
};

class ExpSumField final : public ScalarField2 {
 public:
  double value(Point2 p) const override { return std::exp(p.x + p.y); }
  Vec2 gradient(Point2 p) const override {
    const double v = std::exp(p.x + p.y);
    return {v, v};
  }
  SymMat2 hessian(Point2 p) const override {
    const double v = std::exp(p.x + p.y);
    return {v, v, v};
  }
  DerivativeMode derivative_mode() const override { return DerivativeMode::analytic; }
};

class MaxField final : public ScalarField2 {
 public:
  MaxField(FieldPtr f, FieldPtr g, double fd_step)
      : f_(std::move(f)), g_(std::move(g)), step_(fd_step) {}

  double value(Point2 p) const override { return std::max(f_->value(p), g_->value(p)); }
  Vec2 gradient(Point2 p) const override {
    return fd_gradient([this](Point2 q) { return value(q); }, p, step_);
  }
  SymMat2 hessian(Point2 p) const override {
    return fd_hessian([this](Point2 q) { return value(q); }, p, step_);
  }
  DerivativeMode derivative_mode() const override { return DerivativeMode::finite_difference; }

 private:
  FieldPtr f_;
  FieldPtr g_;
  double step_;
};

double param_or(const std::map<std::string, double>& params, const std::string& key,
                double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

}  // namespace

FieldPtr cassini_field(const CassiniParams& params) {
  require_positive(params.a, "cassini parameter a");
  return std::make_shared<CassiniField>(params.a);
}

FieldPtr g_field(double b) {
  require_positive(b, "companion parameter b");
  return std::make_shared<GCompanionField>(b);
}

FieldPtr quadratic_field() { return std::make_shared<QuadraticField>(); }
FieldPtr saddle_field() { return std::make_shared<SaddleField>(); }
FieldPtr exp_sum_field() { return std::make_shared<ExpSumField>(); }

FieldPtr max_field(FieldPtr f, FieldPtr g, double fd_step) {
  if (!f || !g) throw std::invalid_argument("max_field: null field");
  return std::make_shared<MaxField>(std::move(f), std::move(g), fd_step);
}

FieldPtr make_polynomial(std::vector<Monomial> terms) {
  return std::make_shared<PolynomialField>(std::move(terms));
}

FieldPtr make_builtin(const std::string& name, const std::map<std::string, double>& params) {
  if (name == "cassini") return cassini_field({param_or(params, "a", 1.0)});
  if (name == "cassini-g") return g_field(param_or(params, "b", 1.0));
  if (name == "quadratic") return quadratic_field();
  if (name == "saddle") return saddle_field();
  if (name == "exp-sum") return exp_sum_field();
  throw std::invalid_argument("unknown builtin field: " + name);
}

GroundTruth ground_truth(const CassiniParams& params) {
  require_positive(params.a, "cassini parameter a");
  const double a = params.a;
  const double a4 = a * a * a * a;
  GroundTruth gt;
  gt.min_value = -a4;
  gt.critical_points = {Point2{-a, 0.0}, Point2{0.0, 0.0}, Point2{a, 0.0}};
  gt.nu_max = 0.0;
  gt.h_max = 3.0 * a4;
  gt.sql = 3.0 * a4;
  gt.scl = 3.0 * a4;
  gt.hess_boundary_level = a4 / 3.0;
  gt.inflection_abscissa = a / std::sqrt(3.0);
  return gt;
}

CRegion c_plus_minus_membership(const CassiniParams& params, Point2 p) {
  require_positive(params.a, "cassini parameter a");
  if (!is_finite(p)) throw std::invalid_argument("c_plus_minus_membership: non-finite point");
  const double a4 = params.a * params.a * params.a * params.a;
  const double s = p.x * p.x + p.y * p.y;
  const double f = s * s - 2.0 * params.a * params.a * (p.x * p.x - p.y * p.y);
  if (f < 0.0 && f >= -a4) {
    if (p.x < 0.0) return CRegion::C_minus;
    if (p.x > 0.0) return CRegion::C_plus;
  }
  return CRegion::neither;
}

}  // namespace trunclev
