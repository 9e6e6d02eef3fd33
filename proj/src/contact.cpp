#include "contactflow/contact.hpp"

#include <cmath>

namespace contactflow {

double ContactSystem::degeneracy_tolerance() const {
  return 1e-10 * std::pow(chart.scale(), n + 1);
}

ContactFrame contact_frame(const ContactSystem& sys, const Vector& x) {
  ContactFrame fr;
  fr.eta = sys.eta.value(x);
  fr.deta = exterior_derivative(sys.eta, x, sys.diff);
  const int d = sys.dim();
  // A_{jk} = d eta(e_j, e_k); row k of b is (B v)_k = sum_j (A_{jk} + eta_j eta_k) v_j.
  Matrix A = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      const double c = fr.deta.coefficient({j, k});
      A(j, k) = c;
      A(k, j) = -c;
    }
  const Vector& e = fr.eta.coefficients();
  fr.b = A.transpose() + e * e.transpose();
  fr.lu.compute(fr.b);
  fr.lu_t.compute(fr.b.transpose());
  fr.rcond = fr.lu.rcond();
  return fr;
}

double check_contact(const ContactSystem& sys, const Vector& x) {
  return top_coefficient(liouville_volume(sys, x));
}

KForm liouville_volume(const ContactSystem& sys, const Vector& x) {
  const KForm eta = sys.eta.value(x);
  const KForm deta = exterior_derivative(sys.eta, x, sys.diff);
  return wedge(eta, wedge_power(deta, sys.n));
}

FormField liouville_volume_field(const ContactSystem& sys) {
  FormField out;
  out.degree = sys.dim();
  out.domain = sys.eta.domain;
  out.value = [sys](const Vector& x) { return liouville_volume(sys, x); };
  return out;
}

namespace {

void require_contact(const ContactFrame& fr, double rcond_min, const char* where) {
  if (fr.degenerate(rcond_min))
    throw NumericalError(std::string(where) +
                         ": b_eta is numerically singular (contact condition violated)");
}

}  // namespace

Vector reeb(const ContactSystem& sys, const Vector& x) {
  const ContactFrame fr = contact_frame(sys, x);
  require_contact(fr, sys.rcond_min, "reeb");
  return fr.lu.solve(fr.eta.coefficients());
}

VectorField reeb_field(const ContactSystem& sys) {
  VectorField out;
  out.value = [sys](const Vector& x) { return reeb(sys, x); };
  return out;
}

double lambda2(const ContactSystem& sys, const KForm& a, const KForm& b, const Vector& x) {
  if (a.degree() != 1 || b.degree() != 1)
    throw std::invalid_argument("lambda2: arguments must be 1-forms");
  const ContactFrame fr = contact_frame(sys, x);
  require_contact(fr, sys.rcond_min, "lambda2");
  const Vector va = fr.lu.solve(a.coefficients());
  const Vector vb = fr.lu.solve(b.coefficients());
  return fr.deta.evaluate({va, vb});
}

double jacobi_bracket(const ContactSystem& sys, const ScalarField& f, const ScalarField& g,
                      const Vector& x) {
  const ContactFrame fr = contact_frame(sys, x);
  require_contact(fr, sys.rcond_min, "jacobi_bracket");
  const Vector df = f.grad(x, sys.diff);
  const Vector dg = g.grad(x, sys.diff);
  const Vector xi = fr.lu.solve(fr.eta.coefficients());
  const Vector va = fr.lu.solve(df);
  const Vector vb = fr.lu.solve(dg);
  return fr.deta.evaluate({va, vb}) + f.value(x) * xi.dot(dg) - g.value(x) * xi.dot(df);
}

Vector hamiltonian_field(const ContactSystem& sys, const Vector& x) {
  const ContactFrame fr = contact_frame(sys, x);
  require_contact(fr, sys.rcond_min, "hamiltonian_field");
  const Vector dH = sys.hamiltonian.grad(x, sys.diff);
  const Vector xi = fr.lu.solve(fr.eta.coefficients());
  const double xiH = xi.dot(dH);
  // i_{dH} Lambda as a vector: beta(w) = Lambda(dH, beta) for every beta.
  const Vector w = fr.lu_t.solve(dH) - xiH * xi;
  return -w - sys.hamiltonian.value(x) * xi;
}

VectorField hamiltonian_vector_field(const ContactSystem& sys) {
  VectorField out;
  out.value = [sys](const Vector& x) { return hamiltonian_field(sys, x); };
  return out;
}

Vector darboux_hamiltonian_field(const ContactSystem& sys, const Vector& x) {
  const Vector dH = sys.hamiltonian.grad(x, sys.diff);
  const double H = sys.hamiltonian.value(x);
  Vector out(sys.dim());
  double pdHdp = 0.0;
  for (int i = 0; i < sys.n; ++i) {
    const double Hq = dH[q_axis(i)], Hp = dH[p_axis(i)], p = x[p_axis(i)];
    out[q_axis(i)] = Hp;
    out[p_axis(i)] = -(Hq + p * dH[0]);
    pdHdp += p * Hp;
  }
  out[0] = pdHdp - H;
  return out;
}

double xi_of_h(const ContactSystem& sys, const Vector& x) {
  return reeb(sys, x).dot(sys.hamiltonian.grad(x, sys.diff));
}

ContactSystem conformal_system(const ContactSystem& sys) {
  ContactSystem out = sys;
  const FormField base_eta = sys.eta;
  const ScalarField h = sys.hamiltonian;
  auto safe_h = [h](const Vector& x) {
    const double v = h.value(x);
    if (v == 0.0) throw NumericalError("conformal_system: evaluation at H = 0");
    return v;
  };
  out.eta.degree = 1;
  out.eta.domain = sys.eta.domain;
  out.eta.value = [base_eta, safe_h](const Vector& x) {
    return (-1.0 / safe_h(x)) * base_eta.value(x);
  };
  if (base_eta.derivative && h.gradient) {
    // d(-eta/H) = (1/H^2) dH ^ eta - (1/H) d eta, assembled from the
    // analytic pieces so the conformal Reeb solve stays oracle-grade.
    out.eta.derivative = [base_eta, h, safe_h](const Vector& x) {
      const double H = safe_h(x);
      const KForm eta = base_eta.value(x);
      const KForm deta = base_eta.derivative(x);
      const KForm dH = KForm::covector(h.gradient(x));
      return (1.0 / (H * H)) * wedge(dH, eta) - (1.0 / H) * deta;
    };
  } else {
    out.eta.derivative = nullptr;
  }
  out.hamiltonian.value = [](const Vector&) { return -1.0; };
  out.hamiltonian.gradient = [d = sys.dim()](const Vector&) { return Vector::Zero(d); };
  return out;
}

double measure_residual(const ContactSystem& sys, const ScalarField& sigma, const Vector& x) {
  const Vector xh = hamiltonian_field(sys, x);
  return xh.dot(sigma.grad(x, sys.diff)) - (sys.n + 1) * xi_of_h(sys, x);
}

Chart darboux_chart(int n, double halfwidth, const std::string& name) {
  Chart chart;
  chart.name = name;
  chart.axes.push_back("z");
  for (int i = 1; i <= n; ++i) {
    chart.axes.push_back("q" + std::to_string(i));
    chart.axes.push_back("p" + std::to_string(i));
  }
  chart.box = Box::cube(2 * n + 1, halfwidth);
  return chart;
}

FormField darboux_eta(int n) {
  const int d = 2 * n + 1;
  FormField eta;
  eta.degree = 1;
  eta.value = [n, d](const Vector& x) {
    Vector c = Vector::Zero(d);
    c[0] = 1.0;
    for (int i = 0; i < n; ++i) c[q_axis(i)] = -x[p_axis(i)];
    return KForm::covector(c);
  };
  eta.derivative = [n, d](const Vector&) {
    KForm out(d, 2);
    for (int i = 0; i < n; ++i) out.set_coefficient({q_axis(i), p_axis(i)}, 1.0);
    return out;
  };
  return eta;
}

ChartedForm contactification(const Chart& base, const FormField& lambda, double z_halfwidth) {
  ChartedForm out;
  out.chart = base.with_leading_axis("z", -z_halfwidth, z_halfwidth, base.name + "/contactification");
  out.form.degree = 1;
  out.form.value = [lambda](const Vector& x) {
    const Vector base_pt = x.tail(x.size() - 1);
    KForm eta = lift_leading_axis(lambda.value(base_pt));
    eta.coefficients()[0] += 1.0;  // + dz
    return eta;
  };
  if (lambda.derivative) {
    out.form.derivative = [lambda](const Vector& x) {
      return lift_leading_axis(lambda.derivative(x.tail(x.size() - 1)));
    };
  }
  return out;
}

ChartedForm symplectification(const Chart& base, const FormField& eta, double c,
                              double s_halfwidth) {
  if (c == 0.0) throw std::invalid_argument("symplectification: c must be nonzero");
  ChartedForm out;
  out.chart = base.with_leading_axis("s", -s_halfwidth, s_halfwidth, base.name + "/symplectification");
  DiffOptions diff;
  out.form.degree = 2;
  out.form.value = [eta, c, diff](const Vector& x) {
    const Vector base_pt = x.tail(x.size() - 1);
    const KForm e = lift_leading_axis(eta.value(base_pt));
    const KForm de = lift_leading_axis(exterior_derivative(eta, base_pt, diff));
    const KForm ds = KForm::basis(static_cast<int>(x.size()), {0});
    KForm omega = de + c * wedge(ds, e);
    omega *= std::exp(c * x[0]);
    return omega;
  };
  return out;
}

}  // namespace contactflow

