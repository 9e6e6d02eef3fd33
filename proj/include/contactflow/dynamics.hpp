#pragma once

#include "contactflow/contact.hpp"

#include <iosfwd>
#include <optional>
#include <utility>

namespace contactflow {

enum class FlowStatus { complete, escaped, blowup };

const char* to_string(FlowStatus s);

/**
 * Flow integration options. Flows are never assumed complete: every
 * integration carries an escape region (the chart box inflated by 10% by
 * default) and a blow-up guard, and reports how far it actually got.
 * Downstream constructions must consume the status.
 */
struct FlowOptions {
  enum class Method { rk45, rk4 };
  Method method = Method::rk45;
  double rtol = 1e-10;
  double atol = 1e-10;
  double fixed_step = 1e-3;    // rk4
  double initial_step = 1e-3;  // rk45 first trial step
  std::optional<Box> escape_box;
  double box_inflation = 1.1;
  double blowup_norm_factor = 1e8;
  long max_steps = 2000000;
  bool record_samples = true;

  FlowOptions with_box(const Box& chart_box) const {
    FlowOptions o = *this;
    o.escape_box = chart_box.inflated(box_inflation);
    return o;
  }
};

struct FlowOutcome {
  std::vector<std::pair<double, Vector>> samples;  // (t, point), monotone in t
  double reached_t = 0.0;
  FlowStatus status = FlowStatus::complete;

  bool complete() const { return status == FlowStatus::complete; }
  const Vector& final_point() const { return samples.back().second; }
};

/// Approximate the flow map Phi(t, x0) of the field. Negative t integrates
/// the negated field. Early exit (escape/blow-up) is an outcome, not an
/// error.
FlowOutcome integrate(const VectorField& field, const Vector& x0, double t,
                      const FlowOptions& opts);

enum class JacobianMethod { automatic, finite_difference, variational };

struct FlowJacobian {
  FlowStatus status = FlowStatus::complete;
  Matrix jacobian;  // D_x Phi(t, x0); valid only when status == complete
};

/// Differential of the flow map. Uses the variational equation
/// J' = Df(x) J when the field carries an analytic Jacobian, otherwise
/// central differences of the flow map with step fd_step.
FlowJacobian flow_jacobian(const VectorField& field, const Vector& x0, double t,
                           const FlowOptions& opts, double fd_step = 1e-4,
                           JacobianMethod method = JacobianMethod::automatic);

struct PushforwardResult {
  FlowStatus status = FlowStatus::complete;
  double residual = 0.0;
};

/// rho(Phi_t x0) |det D Phi_t(x0)| / rho(x0) - 1; zero exactly when the
/// density rho times the coordinate volume is carried onto itself along
/// this orbit.
PushforwardResult pushforward_invariance_check(const std::function<double(const Vector&)>& rho,
                                               const VectorField& field, const Vector& x0,
                                               double t, const FlowOptions& opts,
                                               JacobianMethod method = JacobianMethod::automatic);

struct ConservationReport {
  FlowStatus status = FlowStatus::complete;
  // max over the trajectory of |d(H o Phi)/dt + (H xi(H)) o Phi|, with the
  // time derivative taken by finite differences on a uniform resampling.
  double max_rate_residual = 0.0;
  // For z-independent Hamiltonians (xi(H) = 0 along the orbit): the first
  // integral drift max |H o Phi - H(x0)|.
  std::optional<double> first_integral_drift;
};

ConservationReport conservation_probe(const ContactSystem& sys, const Vector& x0, double t,
                                      const FlowOptions& opts, int grid_intervals = 200);

/// Header `t,x0,x1,...`, one row per accepted step.
void write_trajectory_csv(const FlowOutcome& outcome, std::ostream& os);

}  // namespace contactflow
