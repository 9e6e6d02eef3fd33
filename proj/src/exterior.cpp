#include "contactflow/exterior.hpp"

namespace contactflow {

Vector ScalarField::grad(const Vector& x, const DiffOptions& opts) const {
  if (gradient) return gradient(x);
  return fd_gradient(value, x, opts);
}

Matrix VectorField::jac(const Vector& x, const DiffOptions& opts) const {
  if (jacobian) return jacobian(x);
  return fd_jacobian(value, x, opts);
}

Matrix PointMap::jac(const Vector& x, const DiffOptions& opts) const {
  if (jacobian) return jacobian(x);
  return fd_jacobian(value, x, opts);
}

Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                   const DiffOptions& opts) {
  auto central = [&](double h) {
    Vector g(x.size());
    Vector xp = x, xm = x;
    for (int i = 0; i < x.size(); ++i) {
      xp[i] = x[i] + h;
      xm[i] = x[i] - h;
      g[i] = (f(xp) - f(xm)) / (2.0 * h);
      xp[i] = x[i];
      xm[i] = x[i];
    }
    return g;
  };
  if (!opts.richardson) return central(opts.step);
  Vector gh = central(opts.step), gh2 = central(0.5 * opts.step);
  return (4.0 * gh2 - gh) / 3.0;
}

Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x,
                   const DiffOptions& opts) {
  auto central = [&](double h) {
    Vector xp = x, xm = x;
    Matrix jac;
    for (int i = 0; i < x.size(); ++i) {
      xp[i] = x[i] + h;
      xm[i] = x[i] - h;
      Vector col = (f(xp) - f(xm)) / (2.0 * h);
      if (jac.size() == 0) jac.resize(col.size(), x.size());
      jac.col(i) = col;
      xp[i] = x[i];
      xm[i] = x[i];
    }
    return jac;
  };
  if (!opts.richardson) return central(opts.step);
  Matrix jh = central(opts.step), jh2 = central(0.5 * opts.step);
  return (4.0 * jh2 - jh) / 3.0;
}

PointMap compose(const PointMap& outer, const PointMap& inner) {
  if (inner.target_dim != outer.source_dim)
    throw std::invalid_argument("compose: chart dimensions do not chain");
  PointMap out;
  out.source_dim = inner.source_dim;
  out.target_dim = outer.target_dim;
  out.value = [outer, inner](const Vector& x) { return outer.value(inner.value(x)); };
  if (outer.jacobian && inner.jacobian) {
    out.jacobian = [outer, inner](const Vector& x) -> Matrix {
      const Matrix a = outer.jacobian(inner.value(x));
      const Matrix b = inner.jacobian(x);
      return a * b;
    };
  }
  return out;
}

namespace {

KForm fd_exterior_derivative(const FormField& F, const Vector& x, double h) {
  const int dim = static_cast<int>(x.size());
  // One field evaluation per displaced point, shared by every coefficient.
  std::vector<KForm> plus(dim), minus(dim);
  Vector xs = x;
  for (int i = 0; i < dim; ++i) {
    xs[i] = x[i] + h;
    plus[i] = F.value(xs);
    xs[i] = x[i] - h;
    minus[i] = F.value(xs);
    xs[i] = x[i];
  }
  const int k = plus[0].degree();
  KForm out(dim, k + 1);
  const auto& tuples = detail::combos(dim, k + 1);
  std::vector<int> rest(k);
  for (size_t r = 0; r < tuples.size(); ++r) {
    const auto& K = tuples[r];
    double acc = 0.0;
    for (int m = 0; m <= k; ++m) {
      int j = 0;
      for (int i = 0; i <= k; ++i)
        if (i != m) rest[j++] = K[i];
      const long rank = detail::combo_rank(rest);
      const int axis = K[m];
      const double d =
          (plus[axis].coefficients()[rank] - minus[axis].coefficients()[rank]) / (2.0 * h);
      acc += (m % 2 == 0) ? d : -d;
    }
    out.coefficients()[r] = acc;
  }
  return out;
}

}  // namespace

KForm exterior_derivative(const FormField& F, const Vector& x, const DiffOptions& opts) {
  if (F.derivative) return F.derivative(x);
  if (F.domain && !F.domain->interior(x, opts.step))
    throw NumericalError("exterior_derivative: point within one step of the domain boundary");
  if (F.degree >= x.size()) {
    // d of a top form vanishes identically; keep it representable as the
    // zero top form so callers can stay degree-agnostic.
    return KForm(static_cast<int>(x.size()), static_cast<int>(x.size()));
  }
  if (!opts.richardson) return fd_exterior_derivative(F, x, opts.step);
  KForm dh = fd_exterior_derivative(F, x, opts.step);
  KForm dh2 = fd_exterior_derivative(F, x, 0.5 * opts.step);
  KForm out = dh2;
  out.coefficients() = (4.0 * dh2.coefficients() - dh.coefficients()) / 3.0;
  return out;
}

KForm lie_derivative(const VectorField& X, const FormField& F, const Vector& x,
                     const DiffOptions& opts) {
  const int dim = static_cast<int>(x.size());
  const KForm fx = F.value(x);
  const bool top = fx.degree() == dim;

  KForm term1(dim, fx.degree());
  if (!top) term1 = interior_product(X.value(x), exterior_derivative(F, x, opts));

  if (fx.degree() == 0) {
    // L_X f = X(f); the contraction field below would be degree -1.
    KForm out(dim, 0);
    ScalarField f{F.value ? std::function<double(const Vector&)>(
                                [F](const Vector& y) { return F.value(y).coefficients()[0]; })
                          : nullptr,
                  nullptr};
    out.coefficients()[0] = X.value(x).dot(f.grad(x, opts));
    return out;
  }

  FormField contracted;
  contracted.degree = fx.degree() - 1;
  contracted.domain = F.domain;
  contracted.value = [X, F](const Vector& y) { return interior_product(X.value(y), F.value(y)); };
  KForm term2 = exterior_derivative(contracted, x, opts);
  return top ? term2 : term1 + term2;
}

KForm pullback(const PointMap& map, const KForm& w, const Vector& x, const DiffOptions& opts) {
  if (map.target_dim && w.dim() != map.target_dim)
    throw std::invalid_argument("pullback: form dim != map target dim");
  return pullback_linear(map.jac(x, opts), w);
}

FormField pullback_field(const PointMap& map, const FormField& W) {
  FormField out;
  out.degree = W.degree;
  out.value = [map, W](const Vector& x) { return pullback(map, W.value(map.value(x)), x); };
  return out;
}

FormField derivative_field(const FormField& F, const DiffOptions& opts) {
  FormField out;
  out.degree = F.degree + 1;
  out.domain = F.domain;
  out.value = [F, opts](const Vector& x) { return exterior_derivative(F, x, opts); };
  return out;
}

}  // namespace contactflow
