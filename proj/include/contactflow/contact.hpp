#pragma once

#include "contactflow/exterior.hpp"

#include <Eigen/LU>

namespace contactflow {

/**
 * Contact Hamiltonian system on a single chart of dimension 2n + 1.
 *
 * The contact condition (eta ^ (d eta)^n nowhere degenerate) is assumed on
 * the chart and is not verified at construction; check_contact reports the
 * signed volume coefficient and the pointwise operations reject degenerate
 * points through the conditioning threshold below.
 */
struct ContactSystem {
  Chart chart;
  int n = 0;  // chart.dim() == 2 * n + 1
  FormField eta;
  ScalarField hamiltonian;
  DiffOptions diff;
  // b_eta is solved as a dense system with partial pivoting; condition
  // estimates above 1/rcond_min are treated as contact-condition failures.
  double rcond_min = 1e-12;

  int dim() const { return 2 * n + 1; }

  /// |volume coefficient| at or below this is reported as degenerate.
  double degeneracy_tolerance() const;
};

/// Per-point data shared by the pointwise operations: eta, d eta, and the
/// factored matrix of the bundle morphism  b_eta(v) = i_v d eta + eta(v) eta.
struct ContactFrame {
  KForm eta;
  KForm deta;
  Matrix b;
  Eigen::PartialPivLU<Matrix> lu;    // of b
  Eigen::PartialPivLU<Matrix> lu_t;  // of b^T, for the bivector contraction
  double rcond = 0.0;

  bool degenerate(double rcond_min) const { return !(rcond > rcond_min); }
};

ContactFrame contact_frame(const ContactSystem& sys, const Vector& x);

/// Signed coefficient of eta ^ (d eta)^n relative to the coordinate volume.
/// Diagnostic: callers treat |value| <= degeneracy_tolerance() as failure.
double check_contact(const ContactSystem& sys, const Vector& x);

/// The Liouville volume eta ^ (d eta)^n as a form (and as a field).
KForm liouville_volume(const ContactSystem& sys, const Vector& x);
FormField liouville_volume_field(const ContactSystem& sys);

/// Reeb field at x: the unique solution of b_eta(xi) = eta, which is
/// equivalent to eta(xi) = 1 together with i_xi d eta = 0.
Vector reeb(const ContactSystem& sys, const Vector& x);
VectorField reeb_field(const ContactSystem& sys);

/// The 2-vector on 1-forms: Lambda(a, b) = d eta(b_eta^-1 a, b_eta^-1 b).
double lambda2(const ContactSystem& sys, const KForm& a, const KForm& b, const Vector& x);

/// Jacobi bracket {f, g} = Lambda(df, dg) + f xi(g) - g xi(f).
double jacobi_bracket(const ContactSystem& sys, const ScalarField& f, const ScalarField& g,
                      const Vector& x);

/// Hamiltonian vector field X_H = -i_{dH} Lambda - H xi. Satisfies
/// i_{X_H} d eta = dH - xi(H) eta and i_{X_H} eta = -H.
Vector hamiltonian_field(const ContactSystem& sys, const Vector& x);
VectorField hamiltonian_vector_field(const ContactSystem& sys);

/// Closed component formula for X_H on an interleaved Darboux chart
/// (z, q1, p1, ..., qn, pn) with eta = dz - sum p_i dq^i. Kept separate so
/// the bivector route above has an independent cross-check.
Vector darboux_hamiltonian_field(const ContactSystem& sys, const Vector& x);

/// xi(H) at x.
double xi_of_h(const ContactSystem& sys, const Vector& x);

/// System carrying the conformal form -eta/H on {H != 0}. Its Reeb field
/// is X_H of the original system; its Hamiltonian is the constant -1, so
/// its own Hamiltonian field is again that Reeb field.
ContactSystem conformal_system(const ContactSystem& sys);

/// X_H(sigma) - (n+1) xi(H): zero exactly where exp(sigma) eta ^ (d eta)^n
/// is invariant under the Hamiltonian flow.
double measure_residual(const ContactSystem& sys, const ScalarField& sigma, const Vector& x);

// Interleaved Darboux chart layout. Axis 0 is z; pair i (0-based)
// occupies axes 1 + 2i (q) and 2 + 2i (p).
inline int q_axis(int i) { return 1 + 2 * i; }
inline int p_axis(int i) { return 2 + 2 * i; }

/// Chart (z, q1, p1, ..., qn, pn) on a centered cube.
Chart darboux_chart(int n, double halfwidth, const std::string& name = "darboux");

/// The field eta = dz - sum p_i dq^i with its constant exterior derivative.
FormField darboux_eta(int n);

/// Chart plus 1-form: the two contactification/symplectification builders
/// both extend a base chart by a leading line coordinate.
struct ChartedForm {
  Chart chart;
  FormField form;
};

/// Contactification of exact symplectic data: the chart R x M with the
/// contact form dz + lambda. The Reeb field of the result is d/dz.
ChartedForm contactification(const Chart& base, const FormField& lambda,
                             double z_halfwidth = 50.0);

/// Symplectification of (C, eta) with parameter c != 0: the 2-form
/// exp(c s)(d eta + c ds ^ eta) on R x C. It is nondegenerate at (s, x)
/// exactly when eta passes the contact check at x; with c = -1 this is the
/// target structure of the flow-built symplectomorphism (the two displayed
/// sign conventions coincide there).
ChartedForm symplectification(const Chart& base, const FormField& eta, double c,
                              double s_halfwidth = 50.0);

}  // namespace contactflow
