#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "contactflow/scenarios.hpp"
#include "test_util.hpp"

using namespace contactflow;
using testutil::random_vector;

namespace {

struct Fixture {
  DissipativeScenario sc = dissipative_scenario(1.0, "linear");
  LevelSetChart lsc = sc.level_set();
  SandwichMaps maps{lsc, *sc.sigma};
};

}  // namespace

TEST_CASE("rectify: points already on the slice map to (0, y)") {
  Fixture fx;
  VectorField z;
  const VectorField xr = fx.sc.x_h_restricted;
  z.value = [xr](const Vector& u) { return xr.value(u); };
  // sigma(y) = 0 slice of the surface: solve for q1.
  Vector u(4);
  u << 0.0, 0.3, -0.5, 0.2;
  u[0] = -u[2] - (u[1] + u[3]);  // gamma = 1
  REQUIRE(std::abs(fx.sc.sigma->value(u)) <= 1e-14);
  FlowOptions opts;
  opts = opts.with_box(fx.lsc.surface().box);
  // Z = X_H|S has Z(sigma) = 2 gamma = n here, so r = 2 works directly.
  const RectifyOutcome out = rectify(z, *fx.sc.sigma, 2.0, u, opts);
  REQUIRE(out.ok());
  CHECK(out.t == 0.0);
  CHECK((out.point - u).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("rectify: wrong rate is a precondition failure") {
  Fixture fx;
  VectorField z;
  const VectorField xr = fx.sc.x_h_restricted;
  z.value = [xr](const Vector& u) { return xr.value(u); };
  FlowOptions opts;
  opts = opts.with_box(fx.lsc.surface().box);
  const RectifyOutcome out = rectify(z, *fx.sc.sigma, 3.0, random_vector(4), opts);
  CHECK(out.status == RectifyStatus::precondition_failed);
}

TEST_CASE("rectify: leaving the box is a domain failure, not an exception") {
  Fixture fx;
  VectorField z;
  const VectorField xr = fx.sc.x_h_restricted;
  z.value = [xr](const Vector& u) { return xr.value(u); };
  FlowOptions opts;
  opts = opts.with_box(Box::cube(4, 0.2));  // tiny domain: the flow must leave
  Vector u(4);
  u << 0.15, 0.15, 0.15, 0.15;
  const RectifyOutcome out = rectify(z, *fx.sc.sigma, 2.0, u, opts);
  CHECK(out.status == RectifyStatus::domain_failure);
  CHECK(out.detail.find("escaped") != std::string::npos);
}

TEST_CASE("sigma transport along the rectifying flow") {
  Fixture fx;
  for (int trial = 0; trial < 10; ++trial) {
    const Vector u = random_vector(4, 0.8);
    const double t = testutil::uniform(-1.0, 1.0);
    CHECK(fx.maps.sigma_transport_residual(u, t) <= 1e-7);
  }
}

TEST_CASE("phi1: zero-set points are fixed, first slot is H over gamma") {
  Fixture fx;
  // y on S: z = -(|p|^2/2 + V)/gamma.
  Vector u(4);
  u << 0.4, -0.2, 0.1, 0.5;
  const Vector y = insert_coordinate(u, 0, fx.sc.height_closed(u));
  const RectifyOutcome out = fx.maps.phi1(y);
  REQUIRE(out.ok());
  CHECK(std::abs(out.t) <= 1e-12);
  CHECK((out.point - y).cwiseAbs().maxCoeff() <= 1e-12);

  for (int trial = 0; trial < 20; ++trial) {
    const Vector yy = random_vector(5);
    const RectifyOutcome o = fx.maps.phi1(yy);
    REQUIRE(o.ok());
    const auto [z_expected, u_expected] = fx.sc.phi1_closed(yy);
    CHECK(std::abs(o.t - z_expected) <= 1e-9);
    CHECK((drop_coordinate(o.point, 0) - u_expected).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("phi1 pullback and Reeb speed") {
  Fixture fx;
  for (int trial = 0; trial < 20; ++trial) {
    const Vector y = random_vector(5);
    CHECK(fx.maps.phi1_pullback_residual(y) <= 1e-5);
    CHECK(fx.maps.phi1_speed_residual(y) <= 1e-5);
  }
}

TEST_CASE("phi2 matches the closed form at 20 points") {
  Fixture fx;
  for (int trial = 0; trial < 20; ++trial) {
    const Vector u = random_vector(4);
    const RectifyOutcome o = fx.maps.phi2(u);
    REQUIRE(o.ok());
    const auto [s_expected, b_expected] = fx.sc.phi2_closed(u);
    CHECK(std::abs(o.t - s_expected) <= 1e-6);
    CHECK((o.point - b_expected).cwiseAbs().maxCoeff() <= 1e-6);
  }
  // Points already on B are fixed.
  Vector u(4);
  u << 0.0, 0.3, -0.5, 0.2;
  u[0] = -u[2] - (u[1] + u[3]);
  const RectifyOutcome o = fx.maps.phi2(u);
  REQUIRE(o.ok());
  CHECK(std::abs(o.t) <= 1e-12);
  CHECK((o.point - u).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("phi2 pullback, Hamiltonian speed, roundtrip, rectified field") {
  Fixture fx;
  for (int trial = 0; trial < 10; ++trial) {
    const Vector u = random_vector(4);
    CHECK(fx.maps.phi2_pullback_residual(u) <= 1e-5);
    CHECK(fx.maps.phi2_speed_residual(u) <= 1e-5);
    CHECK(fx.maps.roundtrip_residual_phi2(u) <= 1e-7);
    CHECK(fx.maps.rectified_field_residual(u) <= 1e-5);
  }
}

TEST_CASE("eta_B matches the closed form and passes the contact check") {
  Fixture fx;
  REQUIRE(fx.maps.eliminated_axis() == 0);  // q1 eliminated at gamma = 1
  for (int trial = 0; trial < 20; ++trial) {
    const Vector b = random_vector(3);
    CHECK((fx.maps.eta_b(b).coefficients() - fx.sc.eta_b_closed(b).coefficients())
              .cwiseAbs()
              .maxCoeff() <= 1e-8);
    CHECK(std::abs(fx.maps.eta_b_contact_value(b)) >= 0.5);
  }
}

TEST_CASE("slice inclusion lands on B and the squared sigma fails the rate precondition") {
  Fixture fx;
  const Vector b = random_vector(3);
  const Vector u = fx.maps.slice_to_surface(b);
  CHECK(std::abs(fx.sc.sigma->value(u)) <= 1e-12);
  CHECK((fx.maps.surface_to_slice(u) - b).cwiseAbs().maxCoeff() == 0.0);

  // Scaling sigma by 2 moves the rate to 2n: phi2's rectification must refuse.
  ScalarField doubled;
  const ScalarField base = *fx.sc.sigma;
  doubled.value = [base](const Vector& y) { return 2.0 * base.value(y); };
  doubled.gradient = [base](const Vector& y) { return Vector(2.0 * base.grad(y)); };
  SandwichMaps bad(fx.lsc, doubled);
  CHECK_FALSE(bad.sigma_ok());
  const RectifyOutcome o = bad.phi2(random_vector(4));
  CHECK(o.status == RectifyStatus::precondition_failed);
}

TEST_CASE("composite two-step map pulls the extended contact form back to eta") {
  Fixture fx;
  for (int trial = 0; trial < 10; ++trial) {
    CHECK(fx.maps.composite_pullback_residual(random_vector(5)) <= 1e-5);
  }
}

TEST_CASE("a perturbed sigma is flagged as untestable, not as a failure") {
  Fixture fx;
  ScalarField perturbed;
  const ScalarField base = *fx.sc.sigma;
  perturbed.value = [base](const Vector& y) { return base.value(y) + 0.1 * y[0]; };
  perturbed.gradient = [base](const Vector& y) {
    Vector g = base.grad(y);
    g[0] += 0.1;
    return g;
  };
  SandwichMaps maps(fx.lsc, perturbed);
  CHECK_FALSE(maps.sigma_ok());
  CHECK(maps.max_sigma_residual() >= 0.01);
  CHECK(maps.phi2(random_vector(4)).status == RectifyStatus::precondition_failed);
}

TEST_CASE("constant xi(H) is required for phi1") {
  // A non-constant-gamma system: H with a z^2 term has xi(H) = 2z + gamma.
  auto sc = dissipative_scenario(1.0, "linear");
  ContactSystem sys = sc.system;
  const ScalarField base_h = sc.system.hamiltonian;
  sys.hamiltonian.value = [base_h](const Vector& x) {
    return base_h.value(x) + 0.05 * x[0] * x[0];
  };
  sys.hamiltonian.gradient = [base_h](const Vector& x) {
    Vector g = base_h.grad(x);
    g[0] += 0.1 * x[0];
    return g;
  };
  LevelSetChart lsc(sys);
  SandwichMaps maps(lsc, *sc.sigma);
  CHECK_FALSE(maps.constant_xi_ok());
  CHECK(maps.phi1(random_vector(5)).status == RectifyStatus::precondition_failed);
}
