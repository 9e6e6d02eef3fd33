#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "contactflow/scenarios.hpp"
#include "test_util.hpp"

#include <sstream>

using namespace contactflow;
using testutil::random_vector;

namespace {

FlowOptions default_opts(const Chart& chart) {
  FlowOptions o;
  return o.with_box(chart.box);
}

}  // namespace

TEST_CASE("t = 0 returns the start point, complete") {
  const auto sc = dissipative_scenario(1.0, "linear");
  const Vector x0 = random_vector(5);
  const FlowOutcome out = integrate(sc.x_h, x0, 0.0, default_opts(sc.system.chart));
  CHECK(out.status == FlowStatus::complete);
  CHECK(out.samples.size() == 1);
  CHECK((out.final_point() - x0).norm() == 0.0);
}

TEST_CASE("constant Reeb field shifts z only") {
  const auto sc = dissipative_scenario(1.0, "linear");
  const VectorField xi = reeb_field(sc.system);
  const Vector x0 = random_vector(5);
  const FlowOutcome out = integrate(xi, x0, 3.0, default_opts(sc.system.chart));
  REQUIRE(out.status == FlowStatus::complete);
  CHECK(std::abs(out.final_point()[0] - (x0[0] + 3.0)) <= 1e-9);
  CHECK((out.final_point().tail(4) - x0.tail(4)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("restricted drag flow matches the closed form") {
  const auto sc = dissipative_scenario(1.0, "linear");
  // (q, p) = (0, 0, 1, -1) listed per pair: (q1, p1, q2, p2) = (0, 1, 0, -1).
  Vector u0(4);
  u0 << 0.0, 1.0, 0.0, -1.0;
  const FlowOptions opts = default_opts(sc.system.chart.without_axis(0, "surface"));
  const FlowOutcome out = integrate(sc.x_h_restricted, u0, 1.0, opts);
  REQUIRE(out.status == FlowStatus::complete);
  CHECK((out.final_point() - sc.surface_flow(1.0, u0)).cwiseAbs().maxCoeff() <= 1e-8);
  // Backward time as well.
  const FlowOutcome back = integrate(sc.x_h_restricted, u0, -1.5, opts);
  REQUIRE(back.status == FlowStatus::complete);
  CHECK((back.final_point() - sc.surface_flow(-1.5, u0)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("fixed-step rk4 converges at fourth order to the closed flow") {
  const auto sc = dissipative_scenario(1.0, "linear");
  Vector u0(4);
  u0 << 0.2, 0.4, -0.3, 0.1;
  const Chart surface = sc.system.chart.without_axis(0, "surface");
  double prev_err = 0.0;
  for (int k = 0; k < 2; ++k) {
    FlowOptions opts = default_opts(surface);
    opts.method = FlowOptions::Method::rk4;
    opts.fixed_step = (k == 0) ? 0.02 : 0.01;
    const FlowOutcome out = integrate(sc.x_h_restricted, u0, 1.0, opts);
    REQUIRE(out.status == FlowStatus::complete);
    const double err = (out.final_point() - sc.surface_flow(1.0, u0)).cwiseAbs().maxCoeff();
    if (k == 1) CHECK(err <= prev_err / 12.0);  // ~16x for a clean fourth order
    prev_err = err;
  }
}

TEST_CASE("escape and blow-up end the flow with a status, not an error") {
  VectorField outward;
  outward.value = [](const Vector& x) { return x; };  // exponential escape
  FlowOptions opts;
  opts.escape_box = Box::cube(2, 1.0);
  Vector x0(2);
  x0 << 0.9, 0.0;
  const FlowOutcome out = integrate(outward, x0, 5.0, opts);
  CHECK(out.status == FlowStatus::escaped);
  CHECK(out.reached_t < 5.0);
  CHECK(out.reached_t > 0.0);

  VectorField quadratic;
  quadratic.value = [](const Vector& x) { return Vector(x.array().square().matrix()); };
  FlowOptions opts2;  // no box: finite-time blow-up must trip the norm guard
  Vector y0(1);
  y0 << 2.0;
  const FlowOutcome blow = integrate(quadratic, y0, 5.0, opts2);
  CHECK(blow.status == FlowStatus::blowup);
}

TEST_CASE("starting outside the escape box reports escaped immediately") {
  VectorField still;
  still.value = [](const Vector& x) { return Vector(Vector::Zero(x.size())); };
  FlowOptions opts;
  opts.escape_box = Box::cube(2, 1.0);
  Vector x0(2);
  x0 << 3.0, 0.0;
  CHECK(integrate(still, x0, 1.0, opts).status == FlowStatus::escaped);
}

TEST_CASE("flow semigroup property") {
  const auto sc = dissipative_scenario(0.7, "harmonic");
  const Chart surface = sc.system.chart.without_axis(0, "surface");
  const FlowOptions opts = default_opts(surface);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector u0 = random_vector(4);
    const double s = testutil::uniform(0.1, 1.0), t = testutil::uniform(0.1, 1.0);
    const FlowOutcome f_t = integrate(sc.x_h_restricted, u0, t, opts);
    REQUIRE(f_t.complete());
    const FlowOutcome f_st = integrate(sc.x_h_restricted, f_t.final_point(), s, opts);
    const FlowOutcome f_sum = integrate(sc.x_h_restricted, u0, s + t, opts);
    REQUIRE(f_st.complete());
    REQUIRE(f_sum.complete());
    CHECK((f_st.final_point() - f_sum.final_point()).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("flow Jacobian: identity at t = 0") {
  const auto sc = dissipative_scenario(1.0, "linear");
  const FlowJacobian j =
      flow_jacobian(sc.x_h, random_vector(5), 0.0, default_opts(sc.system.chart));
  REQUIRE(j.status == FlowStatus::complete);
  CHECK((j.jacobian - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("flow Jacobian of a linear field matches the matrix exponential") {
  Matrix a(3, 3);
  a << 0.2, -1.0, 0.3, 0.8, 0.1, -0.4, 0.0, 0.5, -0.2;
  VectorField lin;
  lin.value = [a](const Vector& x) { return Vector(a * x); };
  lin.jacobian = [a](const Vector&) { return a; };
  FlowOptions opts;
  const double t = 0.5;
  const Matrix expected = testutil::expm_oracle(Matrix(t * a));
  const FlowJacobian var =
      flow_jacobian(lin, random_vector(3), t, opts, 1e-4, JacobianMethod::variational);
  REQUIRE(var.status == FlowStatus::complete);
  CHECK((var.jacobian - expected).cwiseAbs().maxCoeff() <= 1e-8);
  const FlowJacobian fd =
      flow_jacobian(lin, random_vector(3), t, opts, 1e-4, JacobianMethod::finite_difference);
  REQUIRE(fd.status == FlowStatus::complete);
  CHECK((fd.jacobian - expected).cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("drag flow contracts surface volume at rate 2 gamma") {
  for (double gamma : {0.6, 1.0}) {
    const auto sc = dissipative_scenario(gamma, "linear");
    const Chart surface = sc.system.chart.without_axis(0, "surface");
    const Vector u0 = random_vector(4);
    const double t = 0.8;
    const FlowJacobian j = flow_jacobian(sc.x_h_restricted, u0, t, default_opts(surface));
    REQUIRE(j.status == FlowStatus::complete);
    const double expected = std::exp(-2.0 * gamma * t);
    CHECK(std::abs(j.jacobian.determinant() - expected) / expected <= 1e-6);
  }
}

TEST_CASE("finite-difference and variational flow Jacobians agree") {
  const auto sc = dissipative_scenario(1.0, "harmonic");
  const Chart surface = sc.system.chart.without_axis(0, "surface");
  const Vector u0 = random_vector(4);
  const FlowOptions opts = default_opts(surface);
  const FlowJacobian var =
      flow_jacobian(sc.x_h_restricted, u0, 1.0, opts, 1e-4, JacobianMethod::variational);
  const FlowJacobian fd =
      flow_jacobian(sc.x_h_restricted, u0, 1.0, opts, 1e-4, JacobianMethod::finite_difference);
  REQUIRE(var.status == FlowStatus::complete);
  REQUIRE(fd.status == FlowStatus::complete);
  CHECK((var.jacobian - fd.jacobian).cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("pushforward density checks on the drag surface flow") {
  const auto sc = dissipative_scenario(1.0, "linear");
  const Chart surface = sc.system.chart.without_axis(0, "surface");
  const FlowOptions opts = default_opts(surface);
  const ScalarField sigma = *sc.sigma;
  auto rho = [sigma](const Vector& u) { return std::exp(sigma.value(u)); };

  // t = 0 is exact.
  Vector u0(4);
  u0 << 0.3, -0.2, 0.1, 0.4;
  CHECK(pushforward_invariance_check(rho, sc.x_h_restricted, u0, 0.0, opts).residual == 0.0);

  for (double t : {-2.0, -1.0, 1.0, 2.0}) {
    const PushforwardResult r = pushforward_invariance_check(rho, sc.x_h_restricted, u0, t, opts);
    REQUIRE(r.status == FlowStatus::complete);
    CHECK(std::abs(r.residual) <= 1e-6);
  }

  // A deliberately wrong density: constant rho leaves |det DPhi_1| - 1.
  auto flat = [](const Vector&) { return 1.0; };
  const PushforwardResult wrong =
      pushforward_invariance_check(flat, sc.x_h_restricted, u0, 1.0, opts);
  REQUIRE(wrong.status == FlowStatus::complete);
  CHECK(wrong.residual == doctest::Approx(std::exp(-2.0) - 1.0).epsilon(1e-6));

  CHECK_THROWS_AS(
      pushforward_invariance_check([](const Vector&) { return 0.0; }, sc.x_h_restricted, u0,
                                   1.0, opts),
      std::invalid_argument);
}

TEST_CASE("conservation probe on the drag system") {
  const auto sc = dissipative_scenario(1.0, "harmonic");
  const FlowOptions opts = default_opts(sc.system.chart);
  const Vector x0 = random_vector(5, 0.8);
  const ConservationReport rep = conservation_probe(sc.system, x0, 2.0, opts);
  CHECK(rep.status == FlowStatus::complete);
  CHECK(rep.max_rate_residual <= 1e-6);
  CHECK_FALSE(rep.first_integral_drift.has_value());  // xi(H) = gamma != 0
}

TEST_CASE("conservation probe: constant Hamiltonian and conservative limit") {
  auto sc = dissipative_scenario(1.0, "harmonic");
  ContactSystem flat = sc.system;
  flat.hamiltonian.value = [](const Vector&) { return -1.0; };
  flat.hamiltonian.gradient = [](const Vector&) { return Vector::Zero(5).eval(); };
  const FlowOptions opts = default_opts(flat.chart);
  const ConservationReport rep = conservation_probe(flat, random_vector(5), 2.0, opts);
  CHECK(rep.max_rate_residual <= 1e-12);
  REQUIRE(rep.first_integral_drift.has_value());
  CHECK(*rep.first_integral_drift <= 1e-12);

  // z-independent mechanical energy is a first integral of its own flow.
  ContactSystem cons = sc.system;
  cons.hamiltonian.value = [](const Vector& x) {
    return 0.5 * (x[p_axis(0)] * x[p_axis(0)] + x[p_axis(1)] * x[p_axis(1)]) +
           0.5 * (x[q_axis(0)] * x[q_axis(0)] + x[q_axis(1)] * x[q_axis(1)]);
  };
  cons.hamiltonian.gradient = [](const Vector& x) {
    Vector g = Vector::Zero(5);
    for (int i = 0; i < 2; ++i) {
      g[q_axis(i)] = x[q_axis(i)];
      g[p_axis(i)] = x[p_axis(i)];
    }
    return g;
  };
  const ConservationReport energy = conservation_probe(cons, random_vector(5, 0.5), 5.0, opts);
  REQUIRE(energy.status == FlowStatus::complete);
  REQUIRE(energy.first_integral_drift.has_value());
  CHECK(*energy.first_integral_drift <= 1e-8);
}

TEST_CASE("trajectory CSV layout") {
  const auto sc = dissipative_scenario(1.0, "linear");
  Vector u0(4);
  u0 << 0.0, 1.0, 0.0, -1.0;
  const Chart surface = sc.system.chart.without_axis(0, "surface");
  const FlowOutcome out = integrate(sc.x_h_restricted, u0, 0.5, default_opts(surface));
  std::ostringstream ss;
  write_trajectory_csv(out, ss);
  std::istringstream in(ss.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x0,x1,x2,x3");
  size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == out.samples.size());
}
