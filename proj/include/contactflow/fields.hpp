#pragma once

#include "contactflow/kform.hpp"

#include <functional>
#include <optional>

namespace contactflow {

/// Default finite-difference step on unit-scaled charts: O(h^2) truncation
/// around 1e-10 balances round-off in first derivatives.
inline constexpr double kDefaultStep = 1e-5;

struct DiffOptions {
  double step = kDefaultStep;
  bool richardson = false;  // one level of step-halving extrapolation
};

/// Scalar field with an optional closed-form gradient. When the gradient
/// callback is present it overrides finite differences everywhere.
struct ScalarField {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;  // optional

  double operator()(const Vector& x) const { return value(x); }
  Vector grad(const Vector& x, const DiffOptions& opts = {}) const;
};

struct VectorField {
  std::function<Vector(const Vector&)> value;
  std::function<Matrix(const Vector&)> jacobian;  // optional

  Vector operator()(const Vector& x) const { return value(x); }
  Matrix jac(const Vector& x, const DiffOptions& opts = {}) const;
};

/// Field of k-forms over a chart. The returned KForm must keep a constant
/// dim/degree across the chart; `derivative`, when supplied, must return
/// the exterior derivative and then overrides finite differences.
struct FormField {
  int degree = 0;
  std::function<KForm(const Vector&)> value;
  std::function<KForm(const Vector&)> derivative;  // optional analytic d
  std::optional<Box> domain;                       // margin checks when present

  KForm operator()(const Vector& x) const { return value(x); }
};

/// Differentiable map between charts (inclusions, flow-built maps, ...).
struct PointMap {
  int source_dim = 0;
  int target_dim = 0;
  std::function<Vector(const Vector&)> value;
  std::function<Matrix(const Vector&)> jacobian;  // optional

  Vector operator()(const Vector& x) const { return value(x); }
  Matrix jac(const Vector& x, const DiffOptions& opts = {}) const;
};

Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                   const DiffOptions& opts = {});
Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x,
                   const DiffOptions& opts = {});

PointMap compose(const PointMap& outer, const PointMap& inner);

}  // namespace contactflow
