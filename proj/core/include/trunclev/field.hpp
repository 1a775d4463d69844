// Copyright (c) 2026 the trunclev authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "trunclev/geometry.hpp"

namespace trunclev {

enum class DerivativeMode { analytic, finite_difference };

/// A C^2 scalar field on the plane, evaluatable at any point.
///
/// Implementations must be pure (same input, same output) and re-entrant:
/// evaluations may run from many threads with no synchronization, so no
/// interior mutability is allowed. Evaluations must be total over R^2;
/// fields with poles are out of scope.
class ScalarField2 {
 public:
  virtual ~ScalarField2() = default;

  virtual double value(Point2 p) const = 0;
  virtual Vec2 gradient(Point2 p) const = 0;
  virtual SymMat2 hessian(Point2 p) const = 0;
  virtual DerivativeMode derivative_mode() const = 0;
};

using FieldPtr = std::shared_ptr<const ScalarField2>;

/// Field assembled from analytic value/gradient/Hessian callables.
class AnalyticField final : public ScalarField2 {
 public:
  using ValueFn = std::function<double(Point2)>;
  using GradFn = std::function<Vec2(Point2)>;
  using HessFn = std::function<SymMat2(Point2)>;

  AnalyticField(ValueFn v, GradFn g, HessFn h)
      : value_(std::move(v)), grad_(std::move(g)), hess_(std::move(h)) {}

  double value(Point2 p) const override { return value_(p); }
  Vec2 gradient(Point2 p) const override { return grad_(p); }
  SymMat2 hessian(Point2 p) const override { return hess_(p); }
  DerivativeMode derivative_mode() const override { return DerivativeMode::analytic; }

 private:
  ValueFn value_;
  GradFn grad_;
  HessFn hess_;
};

/// Black-box field: derivatives by central differences with a fixed step.
/// A reasonable step for a window W is 1e-5 * W.window_diag().
class FiniteDifferenceField final : public ScalarField2 {
 public:
  FiniteDifferenceField(std::function<double(Point2)> v, double step);

  double value(Point2 p) const override { return value_(p); }
  Vec2 gradient(Point2 p) const override;
  SymMat2 hessian(Point2 p) const override;
  DerivativeMode derivative_mode() const override { return DerivativeMode::finite_difference; }

  double step() const { return step_; }

 private:
  std::function<double(Point2)> value_;
  double step_;
};

/// One dense monomial c * x^i * y^j of a bivariate polynomial.
struct Monomial {
  int i = 0;
  int j = 0;
  double c = 0.0;
};

/// Bivariate polynomial given as a monomial list; derivatives are exact.
class PolynomialField final : public ScalarField2 {
 public:
  explicit PolynomialField(std::vector<Monomial> terms);

  double value(Point2 p) const override;
  Vec2 gradient(Point2 p) const override;
  SymMat2 hessian(Point2 p) const override;
  DerivativeMode derivative_mode() const override { return DerivativeMode::analytic; }

  const std::vector<Monomial>& terms() const { return terms_; }

 private:
  std::vector<Monomial> terms_;
};

struct DerivativeCheck {
  double grad_err = 0.0;  ///< max-norm gap, analytic vs central-difference gradient
  double hess_err = 0.0;  ///< max-norm gap over Hessian entries
};

/// Compare the field's gradient/Hessian against central differences of its
/// value with step h. Throws on invalid inputs.
DerivativeCheck check_derivatives(const ScalarField2& field, Point2 p, double h);

/// Central-difference gradient/Hessian of an arbitrary value function.
Vec2 fd_gradient(const std::function<double(Point2)>& f, Point2 p, double h);
SymMat2 fd_hessian(const std::function<double(Point2)>& f, Point2 p, double h);

}  // namespace trunclev
