#pragma once

#include "contactflow/zeroset.hpp"

namespace contactflow {

/// A flow failed to reach the time the construction demanded, or a
/// precondition of the construction does not hold at the sample. These are
/// expected outcomes of the domain-limited semantics, not bugs.
struct DomainFailure : NumericalError {
  using NumericalError::NumericalError;
};

enum class RectifyStatus { ok, precondition_failed, domain_failure };

const char* to_string(RectifyStatus s);

struct RectifyOutcome {
  RectifyStatus status = RectifyStatus::ok;
  double t = 0.0;  // sigma(y) / r
  Vector point;    // Phi^Z(-sigma(y)/r, y), on the slice sigma = 0
  std::string detail;

  bool ok() const { return status == RectifyStatus::ok; }
};

/**
 * Flow-based rectification: given Z with Z(sigma) = r != 0, send
 * y |-> (sigma(y)/r, Phi^Z(-sigma(y)/r, y)). The second component lands on
 * the slice D = {sigma = 0} and the restricted flow on R x D inverts the
 * map. The required backward flow may leave its domain; that is returned
 * as a domain failure, never raised.
 */
RectifyOutcome rectify(const VectorField& z_field, const ScalarField& sigma, double r,
                       const Vector& y, const FlowOptions& opts, double precondition_tol = 1e-6,
                       double slice_tol = 1e-9);

struct SandwichOptions {
  FlowOptions flow;             // rectifying flows; tolerances default tight
  double jacobian_step = 1e-4;  // FD step for Jacobians of flow-built maps
  double form_step = 1e-5;      // FD step for derived target forms
  double constant_xi_tol = 1e-8;
  double sigma_residual_tol = 1e-8;
  int grid_per_axis = 3;        // precondition sample grids

  SandwichOptions() {
    flow.rtol = 1e-12;
    flow.atol = 1e-12;
  }
};

/**
 * The two flow-built sandwich maps over a zero level set with constant
 * xi(H) = gamma != 0:
 *
 *   phi1 : C -> R x S   rectifies the Reeb field with sigma = H, r = gamma,
 *                        and pulls dz + theta back to eta;
 *   phi2 : S -> R x B   rectifies Z = X_H|S / gamma with the supplied
 *                        sigma, r = n, and pulls exp(-s)(d eta_B - ds ^
 *                        eta_B) back to d theta.
 *
 * B = {sigma = 0} inside S carries the slice chart obtained by eliminating
 * the surface coordinate with the largest |d sigma| component at the box
 * center. Both maps are built from flows only; closed forms, when a
 * scenario has them, are used strictly as test oracles.
 */
class SandwichMaps {
 public:
  SandwichMaps(LevelSetChart lsc, ScalarField sigma, SandwichOptions opts = {},
               const std::optional<Box>& sample_box = std::nullopt);

  double gamma() const { return gamma_; }
  bool constant_xi_ok() const { return constant_xi_ok_; }
  bool sigma_ok() const { return sigma_ok_; }
  double max_sigma_residual() const { return max_sigma_residual_; }
  const LevelSetChart& level_set() const { return lsc_; }
  const Chart& slice_chart() const { return slice_chart_; }
  int eliminated_axis() const { return elim_axis_; }

  /// Rectification of the Reeb field; the point lies on S (in C coords).
  RectifyOutcome phi1(const Vector& y) const;

  /// Rectification of X_H|S / gamma; the point lies on B (surface coords).
  RectifyOutcome phi2(const Vector& u) const;

  Vector surface_to_slice(const Vector& u_on_b) const;
  Vector slice_to_surface(const Vector& b) const;
  PointMap slice_inclusion() const;  // B -> S with implicit-function Jacobian

  /// i_B* eta through the composed inclusion B -> S -> C.
  KForm eta_b(const Vector& b) const;
  FormField eta_b_field() const;

  /// Contact volume coefficient eta_B ^ (d eta_B)^(n-1) on the slice chart.
  double eta_b_contact_value(const Vector& b) const;

  // phi1 and phi2 as point maps into the extended charts (z, u) and (s, b);
  // evaluation throws DomainFailure when the underlying flow fails.
  PointMap phi1_map() const;
  PointMap phi2_map() const;
  const Chart& phi1_target_chart() const { return contactified_.chart; }
  const Chart& phi2_target_chart() const { return symplectified_.chart; }

  // Pointwise residuals of the structural identities. All of them may
  // throw DomainFailure (callers tabulate those as coverage, not failure).
  double phi1_pullback_residual(const Vector& y) const;   // |phi1*(dz + theta) - eta|
  double phi1_speed_residual(const Vector& y) const;      // |D phi1 (Reeb) - d/dz|
  double phi2_pullback_residual(const Vector& u) const;   // |phi2*(...) - d theta|
  double phi2_speed_residual(const Vector& u) const;      // |D phi2 (X_H|S) - gamma d/ds|
  double composite_pullback_residual(const Vector& y) const;  // Remark-style two-step map
  double roundtrip_residual_phi2(const Vector& u) const;  // |Phi^Z(phi2(u)) - u|
  double rectified_field_residual(const Vector& u) const; // |D phi2 (Z) - d/dt|
  double sigma_transport_residual(const Vector& u, double t) const;

 private:
  LevelSetChart lsc_;
  ScalarField sigma_;
  SandwichOptions opts_;
  double gamma_ = 0.0;
  bool constant_xi_ok_ = false;
  bool sigma_ok_ = false;
  double max_sigma_residual_ = 0.0;
  int elim_axis_ = 0;
  Chart slice_chart_;
  VectorField z_field_;       // X_H|S / gamma on the surface chart
  ScalarField h_on_c_;        // sigma of the phi1 rectification
  FlowOptions flow_c_;        // escape box on C
  FlowOptions flow_s_;        // escape box on S
  ChartedForm contactified_;  // (R x S, dz + theta)
  ChartedForm symplectified_; // (R x B, exp(-s)(d eta_B - ds ^ eta_B))
};

}  // namespace contactflow
