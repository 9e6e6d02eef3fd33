#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "contactflow/scenarios.hpp"
#include "test_util.hpp"

using namespace contactflow;
using testutil::random_vector;

namespace {

DissipativeScenario linear_scenario(double gamma = 1.0) {
  return dissipative_scenario(gamma, "linear");
}

ScalarField constant_field(int dim, double c) {
  return {[c](const Vector&) { return c; },
          [dim](const Vector&) { return Vector::Zero(dim).eval(); }};
}

}  // namespace

TEST_CASE("contact check on the Darboux chart gives the expected volume coefficient") {
  const auto sc = linear_scenario();
  for (int trial = 0; trial < 10; ++trial)
    CHECK(check_contact(sc.system, random_vector(5)) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("a degenerate form reports zero volume") {
  ContactSystem sys;
  sys.chart = darboux_chart(2, 5.0);
  sys.n = 2;
  sys.eta.degree = 1;
  sys.eta.value = [](const Vector& x) {
    Vector c = Vector::Zero(x.size());
    c[0] = 1.0;  // plain dz: not a contact form
    return KForm::covector(c);
  };
  sys.hamiltonian = constant_field(5, -1.0);
  CHECK(check_contact(sys, random_vector(5)) == 0.0);
  CHECK_THROWS_AS(reeb(sys, random_vector(5)), NumericalError);
}

TEST_CASE("Reeb field of the Darboux form is d/dz") {
  const auto sc = linear_scenario();
  Vector unit = Vector::Zero(5);
  unit[0] = 1.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Vector xi = reeb(sc.system, random_vector(5));
    CHECK((xi - unit).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("Reeb field of a conformal rescaling is the Hamiltonian field") {
  const auto sc = linear_scenario();
  const ContactSystem conf = conformal_system(sc.system);
  for (int trial = 0; trial < 20; ++trial) {
    Vector x = random_vector(5);
    while (std::abs(sc.system.hamiltonian.value(x)) < 0.15) x = random_vector(5);
    CHECK((reeb(conf, x) - hamiltonian_field(sc.system, x)).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("scaling eta by a constant scales the Reeb field inversely") {
  const auto sc = linear_scenario();
  const double c = 2.7;
  ContactSystem scaled = sc.system;
  const FormField base = sc.system.eta;
  scaled.eta.value = [base, c](const Vector& x) { return c * base.value(x); };
  scaled.eta.derivative = [base, c](const Vector& x) { return c * base.derivative(x); };
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = random_vector(5);
    CHECK((reeb(scaled, x) - reeb(sc.system, x) / c).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("the 2-vector on Darboux coordinate differentials") {
  const auto sc = linear_scenario();
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = random_vector(5);
    for (int i = 0; i < 2; ++i) {
      const KForm dq = KForm::basis(5, {q_axis(i)});
      const KForm dp = KForm::basis(5, {p_axis(i)});
      const KForm dz = KForm::basis(5, {0});
      CHECK(lambda2(sc.system, dq, dp, x) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(lambda2(sc.system, dz, dp, x) ==
            doctest::Approx(x[p_axis(i)]).epsilon(1e-12));
      const KForm a = testutil::random_form(5, 1);
      CHECK(lambda2(sc.system, a, a, x) == 0.0);
    }
  }
}

TEST_CASE("Jacobi bracket: pairing with -1 gives the Reeb derivative, f = g gives zero") {
  const auto sc = linear_scenario();
  const ScalarField minus_one = constant_field(5, -1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = random_vector(5);
    ScalarField f;
    const Vector a = random_vector(5);
    f.value = [a](const Vector& y) { return std::sin(a.dot(y)); };
    f.gradient = [a](const Vector& y) { return Vector(std::cos(a.dot(y)) * a); };
    CHECK(jacobi_bracket(sc.system, f, minus_one, x) ==
          doctest::Approx(reeb(sc.system, x).dot(f.gradient(x))).epsilon(1e-12));
    CHECK(jacobi_bracket(sc.system, f, f, x) == 0.0);
  }
}

TEST_CASE("Jacobi bracket is a first-order operator in each slot") {
  const auto sc = linear_scenario();
  const ScalarField one = constant_field(5, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector x = random_vector(5);
    auto mk = [](const Vector& a, double phase) {
      ScalarField f;
      f.value = [a, phase](const Vector& y) { return std::sin(a.dot(y) + phase) + 0.3 * y[0]; };
      f.gradient = [a, phase](const Vector& y) {
        Vector g = std::cos(a.dot(y) + phase) * a;
        g[0] += 0.3;
        return g;
      };
      return f;
    };
    const ScalarField f = mk(random_vector(5), 0.4);
    const ScalarField fp = mk(random_vector(5), 1.9);
    const ScalarField& h = sc.system.hamiltonian;
    ScalarField prod;
    prod.value = [f, fp](const Vector& y) { return f.value(y) * fp.value(y); };
    prod.gradient = [f, fp](const Vector& y) {
      return Vector(f.value(y) * fp.gradient(y) + fp.value(y) * f.gradient(y));
    };
    const double lhs = jacobi_bracket(sc.system, prod, h, x);
    const double rhs = f.value(x) * jacobi_bracket(sc.system, fp, h, x) +
                       fp.value(x) * jacobi_bracket(sc.system, f, h, x) -
                       f.value(x) * fp.value(x) * jacobi_bracket(sc.system, one, h, x);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("Hamiltonian field: constant -1 recovers the Reeb field") {
  const auto sc = linear_scenario();
  ContactSystem sys = sc.system;
  sys.hamiltonian = constant_field(5, -1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = random_vector(5);
    CHECK((hamiltonian_field(sys, x) - reeb(sys, x)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("Hamiltonian field components match the drag equations of motion") {
  for (double gamma : {0.5, 1.0, 2.0}) {
    const auto sc = dissipative_scenario(gamma, "harmonic");
    for (int trial = 0; trial < 10; ++trial) {
      const Vector x = random_vector(5);
      const Vector xh = hamiltonian_field(sc.system, x);
      const Vector grad_v = sc.potential.gradient(
          (Vector(2) << x[q_axis(0)], x[q_axis(1)]).finished());
      const double h = sc.system.hamiltonian.value(x);
      // (z, q, p) listing: z-rate p . dH/dp - H, q-rates p_i, p-rates -dV/dq_i - gamma p_i.
      const double pp = x[p_axis(0)] * x[p_axis(0)] + x[p_axis(1)] * x[p_axis(1)];
      CHECK(xh[0] == doctest::Approx(pp - h).epsilon(1e-12));
      for (int i = 0; i < 2; ++i) {
        CHECK(xh[q_axis(i)] == doctest::Approx(x[p_axis(i)]).epsilon(1e-12));
        CHECK(xh[p_axis(i)] ==
              doctest::Approx(-grad_v[i] - gamma * x[p_axis(i)]).epsilon(1e-12));
      }
      CHECK((xh - darboux_hamiltonian_field(sc.system, x)).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("defining relations and the energy rate hold at random points") {
  const auto sc = linear_scenario(1.3);
  const ContactSystem& sys = sc.system;
  for (int trial = 0; trial < 100; ++trial) {
    const Vector x = random_vector(5);
    const ContactFrame fr = contact_frame(sys, x);
    const Vector xh = hamiltonian_field(sys, x);
    const Vector dh = sys.hamiltonian.grad(x);
    const double xih = xi_of_h(sys, x);
    const KForm defect =
        interior_product(xh, fr.deta) - KForm::covector(dh) + xih * fr.eta;
    CHECK(defect.max_abs() <= 1e-10);
    CHECK(std::abs(fr.eta.evaluate({xh}) + sys.hamiltonian.value(x)) <= 1e-10);
    CHECK(std::abs(xh.dot(dh) + sys.hamiltonian.value(x) * xih) <= 1e-10);
  }
}

TEST_CASE("transport of eta and of the volume under the Hamiltonian flow direction") {
  const auto sc = linear_scenario();
  const ContactSystem& sys = sc.system;
  const VectorField xh = hamiltonian_vector_field(sys);
  const FormField nu = liouville_volume_field(sys);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = random_vector(5);
    const double xih = xi_of_h(sys, x);
    CHECK((lie_derivative(xh, sys.eta, x) + xih * sys.eta.value(x)).max_abs() <= 1e-8);
    CHECK((lie_derivative(xh, nu, x) + 3.0 * xih * nu.value(x)).max_abs() <= 1e-8);
  }
}

TEST_CASE("conformal system: H = -1 leaves the form unchanged; volume ratio at H = 2") {
  const auto sc = linear_scenario();
  ContactSystem minus_one = sc.system;
  minus_one.hamiltonian = constant_field(5, -1.0);
  const ContactSystem conf1 = conformal_system(minus_one);
  const Vector x = random_vector(5);
  CHECK((conf1.eta.value(x) - sc.system.eta.value(x)).max_abs() <= 1e-14);
  CHECK(check_contact(conf1, x) == doctest::Approx(check_contact(sc.system, x)).epsilon(1e-12));

  ContactSystem at_two = sc.system;
  at_two.hamiltonian = constant_field(5, 2.0);
  const ContactSystem conf2 = conformal_system(at_two);
  CHECK(check_contact(conf2, x) / check_contact(sc.system, x) ==
        doctest::Approx(-1.0 / 8.0).epsilon(1e-12));

  ContactSystem zero = sc.system;
  zero.hamiltonian = constant_field(5, 0.0);
  CHECK_THROWS_AS(conformal_system(zero).eta.value(x), NumericalError);
}

TEST_CASE("measure residual on the chart") {
  const double gamma = 0.8;
  const auto sc = linear_scenario(gamma);
  const ContactSystem& sys = sc.system;
  const int n = sys.n;

  // sigma = -(n+1) ln |H| kills the residual on {H != 0}.
  ScalarField sigma_log;
  const ScalarField h = sys.hamiltonian;
  sigma_log.value = [h, n](const Vector& x) { return -(n + 1) * std::log(std::abs(h.value(x))); };
  sigma_log.gradient = [h, n](const Vector& x) {
    return Vector(-(n + 1) / h.value(x) * h.gradient(x));
  };
  for (int trial = 0; trial < 20; ++trial) {
    Vector x = random_vector(5);
    while (std::abs(h.value(x)) < 0.2) x = random_vector(5);
    CHECK(std::abs(measure_residual(sys, sigma_log, x)) <= 1e-8);
  }

  // Constant sigma on a constant Hamiltonian: exactly zero.
  ContactSystem flat = sys;
  flat.hamiltonian = constant_field(5, -1.0);
  CHECK(measure_residual(flat, constant_field(5, 0.7), random_vector(5)) == 0.0);

  // sigma = 0 leaves -(n+1) xi(H) = -3 gamma.
  CHECK(measure_residual(sys, constant_field(5, 0.0), random_vector(5)) ==
        doctest::Approx(-3.0 * gamma).epsilon(1e-12));
}

TEST_CASE("conservative limit: z-independent Hamiltonians are first integrals") {
  auto sc = linear_scenario();
  ContactSystem cons = sc.system;
  cons.hamiltonian.value = [](const Vector& x) {
    return 0.5 * (x[p_axis(0)] * x[p_axis(0)] + x[p_axis(1)] * x[p_axis(1)]) +
           x[q_axis(0)] + x[q_axis(1)];
  };
  cons.hamiltonian.gradient = [](const Vector& x) {
    Vector g = Vector::Zero(5);
    for (int i = 0; i < 2; ++i) {
      g[q_axis(i)] = 1.0;
      g[p_axis(i)] = x[p_axis(i)];
    }
    return g;
  };
  const VectorField field = hamiltonian_vector_field(cons);
  const FormField nu = liouville_volume_field(cons);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = random_vector(5);
    CHECK(std::abs(xi_of_h(cons, x)) <= 1e-12);
    CHECK(std::abs(hamiltonian_field(cons, x).dot(cons.hamiltonian.grad(x))) <= 1e-10);
    CHECK(lie_derivative(field, nu, x).max_abs() <= 1e-8);
  }
}
