#pragma once

#include "contactflow/dynamics.hpp"

#include <memory>

namespace contactflow {

/**
 * The zero level set S = {H = 0} presented as a graph z = zeta(u) over the
 * conjugate-pair block u = (q1, p1, ..., qn, pn) of an interleaved Darboux
 * chart. The graph presentation is canonical under the transversality
 * hypothesis xi(H) != 0 (the Reeb field is d/dz on such charts); surfaces
 * that are not graphs over that block are out of scope.
 *
 * Copies share state, so the closures returned below stay valid for as
 * long as any copy lives. The height solver keeps a warm-start cache;
 * keep one chart (and its copies) on a single execution thread.
 */
class LevelSetChart {
 public:
  explicit LevelSetChart(ContactSystem sys, double tol_h = 1e-12, int max_iterations = 50);

  const ContactSystem& system() const;
  const Chart& surface() const;
  int dof() const;

  /// Newton in the z coordinate to |H| <= tol_h (plus one polishing step).
  double height(const Vector& u, std::optional<double> z0 = std::nullopt) const;

  /// Inclusion psi(u) = (zeta(u), u).
  Vector include(const Vector& u) const;

  /// d zeta / d u by implicit differentiation: -H_u / H_z along the graph.
  Vector height_gradient(const Vector& u) const;

  /// D psi, a (2n+1) x 2n matrix whose top row is the height gradient.
  Matrix inclusion_jacobian(const Vector& u) const;

  PointMap inclusion_map() const;

  /// xi(H) at psi(u).
  double xi_h(const Vector& u) const;

  void reset_warm_start() const;

 private:
  struct State;
  std::shared_ptr<State> s_;
};

/**
 * Induced structure at a surface point: theta is the pullback of eta by the
 * inclusion, omega = d theta its exterior derivative on the surface chart,
 * and the Liouville field solves the linear system encoding i_Delta omega =
 * theta.
 *
 * Sign conventions, fixed here and used everywhere: omega_matrix(i, j) =
 * omega(e_i, e_j), and i_Delta omega is the covector u |-> omega(Delta, u).
 */
struct InducedStructure {
  KForm theta;       // degree 1 on the surface chart
  KForm omega;       // degree 2, exactly antisymmetric by construction
  Vector liouville;  // Delta
  double omega_det = 0.0;
  double liouville_residual = 0.0;  // |i_Delta omega - theta|_inf after the solve
};

/// Matrix W with W(i, j) = w(e_i, e_j) of a 2-form.
Matrix two_form_matrix(const KForm& w);

InducedStructure induced(const LevelSetChart& lsc, const Vector& u,
                         double omega_det_tol = 1e-8);

/// theta as a field over the surface chart (feeds omega = d theta).
FormField induced_theta_field(const LevelSetChart& lsc);

/// The Liouville field as a vector field over the surface chart.
VectorField liouville_vector_field(const LevelSetChart& lsc);

/// The u-components of X_H(psi(u)). The z-component is redundant by
/// tangency and is asserted against the graph differential to 1e-8; a
/// violation signals a surface-solve or derivative bug and throws.
Vector restricted_field(const LevelSetChart& lsc, const Vector& u);

VectorField restricted_vector_field(const LevelSetChart& lsc);

/// X_H|S(sigma)(u) - n xi(H)(psi(u)); zero exactly where the measure
/// exp(sigma)/xi(H) (d theta)^n is invariant under the restricted flow.
double sigma_residual_s(const LevelSetChart& lsc, const ScalarField& sigma, const Vector& u);

/// exp(sigma(u))/xi(H)(psi(u)) times the top coefficient of (d theta)^n in
/// surface coordinates.
double measure_density_s(const LevelSetChart& lsc, const ScalarField& sigma, const Vector& u);

/**
 * Grid-seeded Newton search for zeros of the restricted field. Every
 * returned root satisfies |field| <= root_tol. A non-empty result is an
 * obstruction (no invariant measure can exist on S); an empty result is
 * only "no obstruction found", never a proof of absence.
 */
std::vector<Vector> find_equilibria(const LevelSetChart& lsc, const Box& search_box,
                                    int grid_per_axis, double root_tol = 1e-10);

}  // namespace contactflow
