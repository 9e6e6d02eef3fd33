#include "contactflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace contactflow {

const char* to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::complete: return "complete";
    case FlowStatus::escaped: return "escaped";
    case FlowStatus::blowup: return "blowup";
  }
  return "unknown";
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Guard {
  std::optional<Box> box;
  double max_norm;

  bool finite(const Vector& y) const { return y.allFinite(); }
  bool blown(const Vector& y) const { return !finite(y) || y.norm() > max_norm; }
  bool outside(const Vector& y) const { return box && !box->contains(y); }
};

FlowOutcome run_integration(const std::function<Vector(const Vector&)>& rhs, const Vector& x0,
                            double t, const FlowOptions& opts, int guarded_head) {
  FlowOutcome out;
  const double direction = t < 0 ? -1.0 : 1.0;
  const double duration = std::abs(t);
  Guard guard{opts.escape_box,
              opts.blowup_norm_factor * std::max(1.0, x0.head(guarded_head).norm())};

  auto record = [&](double tau, const Vector& y) {
    if (opts.record_samples || out.samples.empty())
      out.samples.emplace_back(direction * tau, y);
    else
      out.samples.back() = {direction * tau, y};
  };

  record(0.0, x0);
  out.reached_t = 0.0;
  if (guard.outside(x0.head(guarded_head))) {
    out.status = FlowStatus::escaped;
    return out;
  }
  if (duration == 0.0) {
    out.status = FlowStatus::complete;
    return out;
  }

  // The field is negated for backward time; internally tau runs forward.
  auto f = [&](const Vector& y) { return direction < 0 ? Vector(-rhs(y)) : rhs(y); };

  Vector y = x0;
  double tau = 0.0;

  auto accept = [&](double new_tau, const Vector& y_new) -> bool {
    // Returns false when integration must stop at the previous state.
    if (!guard.finite(y_new) || guard.blown(y_new.head(guarded_head))) {
      out.status = FlowStatus::blowup;
      return false;
    }
    y = y_new;
    tau = new_tau;
    record(tau, y);
    out.reached_t = direction * tau;
    if (guard.outside(y.head(guarded_head))) {
      out.status = FlowStatus::escaped;
      return false;
    }
    return true;
  };

  if (opts.method == FlowOptions::Method::rk4) {
    const double h0 = std::min(std::abs(opts.fixed_step), duration);
    long nsteps = static_cast<long>(std::ceil(duration / h0 - 1e-12));
    const double h = duration / static_cast<double>(nsteps);
    for (long i = 0; i < nsteps; ++i) {
      const Vector k1 = f(y);
      const Vector k2 = f(y + 0.5 * h * k1);
      const Vector k3 = f(y + 0.5 * h * k2);
      const Vector k4 = f(y + h * k3);
      const Vector y_new = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!accept((i + 1 == nsteps) ? duration : tau + h, y_new)) return out;
    }
    out.status = FlowStatus::complete;
    out.reached_t = t;
    return out;
  }

  // Adaptive Dormand-Prince with FSAL.
  double h = std::min(std::abs(opts.initial_step), duration);
  Vector k1 = f(y);
  long steps = 0;
  while (tau < duration) {
    if (++steps > opts.max_steps || !(h > 0.0) || !std::isfinite(h)) {
      out.status = FlowStatus::blowup;  // stalled step control counts as failure
      return out;
    }
    h = std::min(h, duration - tau);
    const Vector k2 = f(y + h * (a21 * k1));
    const Vector k3 = f(y + h * (a31 * k1 + a32 * k2));
    const Vector k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vector k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vector k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vector y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    if (!y5.allFinite()) {
      out.status = FlowStatus::blowup;
      return out;
    }
    const Vector k7 = f(y5);
    const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err_norm = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      const double r = err[i] / sc;
      err_norm += r * r;
    }
    err_norm = std::sqrt(err_norm / static_cast<double>(y.size()));

    if (err_norm <= 1.0 || h <= 1e-14 * std::max(1.0, tau)) {
      const double new_tau = (duration - tau - h <= 1e-15 * duration) ? duration : tau + h;
      if (!accept(new_tau, y5)) return out;
      k1 = k7;
    }
    const double factor =
        err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
  }
  out.status = FlowStatus::complete;
  out.reached_t = t;
  return out;
}

}  // namespace

FlowOutcome integrate(const VectorField& field, const Vector& x0, double t,
                      const FlowOptions& opts) {
  return run_integration(field.value, x0, t, opts, static_cast<int>(x0.size()));
}

FlowJacobian flow_jacobian(const VectorField& field, const Vector& x0, double t,
                           const FlowOptions& opts, double fd_step, JacobianMethod method) {
  const int d = static_cast<int>(x0.size());
  FlowJacobian out;
  if (method == JacobianMethod::automatic)
    method = field.jacobian ? JacobianMethod::variational : JacobianMethod::finite_difference;

  if (method == JacobianMethod::variational) {
    if (!field.jacobian)
      throw std::invalid_argument("flow_jacobian: variational route needs an analytic Jacobian");
    // Augmented state (x, J) with J' = Df(x) J; guards watch only x.
    auto rhs = [&field, d](const Vector& s) {
      const Vector x = s.head(d);
      Eigen::Map<const Matrix> J(s.data() + d, d, d);
      Vector ds(d + d * d);
      ds.head(d) = field.value(x);
      Eigen::Map<Matrix>(ds.data() + d, d, d) = field.jacobian(x) * J;
      return ds;
    };
    Vector s0(d + d * d);
    s0.head(d) = x0;
    Eigen::Map<Matrix>(s0.data() + d, d, d) = Matrix::Identity(d, d);
    FlowOptions o = opts;
    o.record_samples = false;
    FlowOutcome run = run_integration(rhs, s0, t, o, d);
    out.status = run.status;
    if (run.complete())
      out.jacobian = Eigen::Map<const Matrix>(run.final_point().data() + d, d, d);
    return out;
  }

  FlowOptions o = opts;
  o.record_samples = false;
  out.jacobian.resize(d, d);
  for (int i = 0; i < d; ++i) {
    Vector xp = x0, xm = x0;
    xp[i] += fd_step;
    xm[i] -= fd_step;
    const FlowOutcome fp = integrate(field, xp, t, o);
    const FlowOutcome fm = integrate(field, xm, t, o);
    if (!fp.complete() || !fm.complete()) {
      out.status = !fp.complete() ? fp.status : fm.status;
      return out;
    }
    out.jacobian.col(i) = (fp.final_point() - fm.final_point()) / (2.0 * fd_step);
  }
  out.status = FlowStatus::complete;
  return out;
}

PushforwardResult pushforward_invariance_check(const std::function<double(const Vector&)>& rho,
                                               const VectorField& field, const Vector& x0,
                                               double t, const FlowOptions& opts,
                                               JacobianMethod method) {
  PushforwardResult out;
  const double rho0 = rho(x0);
  if (rho0 == 0.0) throw std::invalid_argument("pushforward_invariance_check: rho(x0) = 0");
  FlowOptions o = opts;
  o.record_samples = false;
  const FlowOutcome flow = integrate(field, x0, t, o);
  if (!flow.complete()) {
    out.status = flow.status;
    return out;
  }
  const FlowJacobian jac = flow_jacobian(field, x0, t, opts, 1e-4, method);
  if (jac.status != FlowStatus::complete) {
    out.status = jac.status;
    return out;
  }
  out.residual = rho(flow.final_point()) * std::abs(jac.jacobian.determinant()) / rho0 - 1.0;
  return out;
}

ConservationReport conservation_probe(const ContactSystem& sys, const Vector& x0, double t,
                                      const FlowOptions& opts, int grid_intervals) {
  ConservationReport rep;
  const VectorField field = hamiltonian_vector_field(sys);
  if (t == 0.0 || grid_intervals < 4) {
    rep.first_integral_drift = 0.0;
    return rep;
  }
  const double dt = t / static_cast<double>(grid_intervals);
  FlowOptions o = opts;
  o.record_samples = false;

  std::vector<Vector> pts;
  pts.reserve(grid_intervals + 1);
  pts.push_back(x0);
  for (int k = 1; k <= grid_intervals; ++k) {
    const FlowOutcome seg = integrate(field, pts.back(), dt, o);
    if (!seg.complete()) {
      rep.status = seg.status;
      break;
    }
    pts.push_back(seg.final_point());
  }

  const int m = static_cast<int>(pts.size());
  std::vector<double> hval(m), rate(m);
  double max_xih = 0.0, href = 0.0;
  for (int k = 0; k < m; ++k) {
    hval[k] = sys.hamiltonian.value(pts[k]);
    const double xih = xi_of_h(sys, pts[k]);
    rate[k] = hval[k] * xih;
    max_xih = std::max(max_xih, std::abs(xih));
    href = std::max(href, std::abs(hval[k]));
  }
  // Fourth-order five-point stencil keeps the time-differencing error well
  // below the integrator tolerance at these grid sizes.
  for (int k = 2; k + 2 < m; ++k) {
    const double dHdt =
        (-hval[k + 2] + 8.0 * hval[k + 1] - 8.0 * hval[k - 1] + hval[k - 2]) / (12.0 * dt);
    rep.max_rate_residual = std::max(rep.max_rate_residual, std::abs(dHdt + rate[k]));
  }
  if (max_xih <= 1e-12 * std::max(1.0, href)) {
    double drift = 0.0;
    for (int k = 0; k < m; ++k) drift = std::max(drift, std::abs(hval[k] - hval[0]));
    rep.first_integral_drift = drift;
  }
  return rep;
}

void write_trajectory_csv(const FlowOutcome& outcome, std::ostream& os) {
  if (outcome.samples.empty()) return;
  const int d = static_cast<int>(outcome.samples.front().second.size());
  os << "t";
  for (int i = 0; i < d; ++i) os << ",x" << i;
  os << "\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (const auto& [t, x] : outcome.samples) {
    put(t);
    for (int i = 0; i < d; ++i) {
      os << ",";
      put(x[i]);
    }
    os << "\n";
  }
}

}  // namespace contactflow
