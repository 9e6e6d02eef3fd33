#pragma once

#include "contactflow/sandwich.hpp"

namespace contactflow {

// Surface-chart layout (q1, p1, ..., qn, pn): pair i occupies axes 2i, 2i+1.
inline int sq_axis(int i) { return 2 * i; }
inline int sp_axis(int i) { return 2 * i + 1; }

/// Configuration-space potential with analytic derivatives. Built-ins:
/// "linear" (sum q_i, no critical points), "harmonic" (|q|^2/2, critical
/// point at the origin), "cubic" (sum q_i^3/3 + q_i, critical-point-free).
struct Potential {
  std::string name;
  std::function<double(const Vector&)> value;     // argument is q only
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;
};

Potential make_potential(const std::string& name, int dof);

/**
 * Mechanical system with linear drag on the Darboux chart (z, q, p):
 * H = |p|^2 / 2 + V(q) + gamma z, two degrees of freedom. xi(H) = gamma
 * everywhere, so the zero set machinery and both sandwich maps apply.
 *
 * With the linear potential the scenario carries closed-form oracles
 * (surface flow, sigma, phi1, phi2, eta_B); each one is probed for
 * self-consistency at construction. The oracles are for tests only; the
 * library constructions never consult them.
 */
struct DissipativeScenario {
  ContactSystem system;
  int n = 2;
  double gamma = 1.0;
  Potential potential;

  VectorField x_h;             // analytic field + Jacobian on the chart
  VectorField x_h_restricted;  // analytic field + Jacobian on the surface

  // Closed-form graph height of the zero set, z = -(|p|^2/2 + V)/gamma.
  std::function<double(const Vector&)> height_closed;

  // Present only for the linear potential:
  std::optional<ScalarField> sigma;  // transport solution on the surface
  std::function<Vector(double, const Vector&)> surface_flow;
  std::function<Matrix(double, const Vector&)> surface_flow_jacobian;
  std::function<std::pair<double, Vector>(const Vector&)> phi1_closed;  // (z, u)
  std::function<std::pair<double, Vector>(const Vector&)> phi2_closed;  // (s, point on B)
  std::function<KForm(const Vector&)> eta_b_closed;  // on the slice (p1, q2, p2)

  LevelSetChart level_set() const { return LevelSetChart(system); }
};

DissipativeScenario dissipative_scenario(double gamma, const std::string& potential,
                                         double box_halfwidth = 20.0);

/**
 * Cotangent-bundle sampler measure: the exact symplectic chart (q, p) with
 * lambda = sum p_i dq^i, the dilation field p d/dp, kinetic energy of a
 * Riemannian metric, sigma = ln(K)/2 + F(q), and the invariant density
 * K^{-n/2} rho(q). Evaluation is excluded inside a tube around p = 0,
 * where the density blows up. Metrics: "identity" and "diagonal"
 * (g_ii = 1 + sin(q_i)^2 / 2).
 */
struct SamplerScenario {
  Chart chart;
  int dof = 2;
  double exclusion_radius = 1e-3;
  std::string metric;

  FormField lambda;      // sum p dq, analytic derivative
  ScalarField kinetic;   // K_g, analytic gradient
  ScalarField f_of_q;    // F as a field on the chart
  ScalarField sigma;     // ln(K)/2 + F(q), analytic gradient
  VectorField dilation;  // p d/dp, analytic Jacobian

  std::function<double(const Vector&)> density;  // K^{-n/2} rho(q) |top((d lambda)^n)|

  void require_outside_tube(const Vector& x) const;
};

SamplerScenario cotangent_sampler(const std::string& metric, int dof,
                                  double exclusion_radius = 1e-3,
                                  double box_halfwidth = 3.0);

/// Contactification of exact symplectic data as a ready contact system;
/// the Hamiltonian is the constant -1, whose dynamics is the Reeb flow.
ContactSystem contactify(const Chart& base, const FormField& lambda);

/// The 2-form exp(c s)(d eta + c ds ^ eta) on the extended chart; it is a
/// symplectic structure exactly where eta passes the contact check.
ChartedForm symplectify(const Chart& base, const FormField& eta, double c);

/**
 * Restriction of a standard kinetic Hamiltonian on T*R^2 to an energy
 * level, as a contact system: the level {|p|^2/2 = 1} with the chart
 * (q1, q2, phi), p = sqrt(2)(cos phi, sin phi), carrying the restricted
 * tautological form. Its Reeb field must match the restricted symplectic
 * dynamics divided by the Liouville rate, which is the expected field
 * below.
 */
struct EnergyLevelDemo {
  ContactSystem system;
  VectorField expected_reeb;
};

EnergyLevelDemo energy_level_demo(double box_halfwidth = 3.0);

}  // namespace contactflow
