#include "contactflow/sandwich.hpp"

#include <cmath>

namespace contactflow {

const char* to_string(RectifyStatus s) {
  switch (s) {
    case RectifyStatus::ok: return "ok";
    case RectifyStatus::precondition_failed: return "precondition_failed";
    case RectifyStatus::domain_failure: return "domain_failure";
  }
  return "unknown";
}

RectifyOutcome rectify(const VectorField& z_field, const ScalarField& sigma, double r,
                       const Vector& y, const FlowOptions& opts, double precondition_tol,
                       double slice_tol) {
  RectifyOutcome out;
  if (r == 0.0) throw std::invalid_argument("rectify: r must be nonzero");
  const double rate = z_field.value(y).dot(sigma.grad(y));
  if (std::abs(rate - r) > precondition_tol) {
    out.status = RectifyStatus::precondition_failed;
    out.detail = "Z(sigma) = " + std::to_string(rate) + " differs from r = " + std::to_string(r);
    return out;
  }
  const double s = sigma.value(y);
  out.t = s / r;
  FlowOptions o = opts;
  o.record_samples = false;
  const FlowOutcome flow = integrate(z_field, y, -s / r, o);
  if (!flow.complete()) {
    // Exactly the graph condition of the domain-limited statement failing:
    // the point (-sigma(y)/r, y) is outside the flow domain.
    out.status = RectifyStatus::domain_failure;
    out.detail = std::string("flow ") + to_string(flow.status) + " at t = " +
                 std::to_string(flow.reached_t) + " of " + std::to_string(-s / r);
    return out;
  }
  out.point = flow.final_point();
  const double slice_sigma = sigma.value(out.point);
  if (std::abs(slice_sigma) > slice_tol) {
    out.status = RectifyStatus::domain_failure;
    out.detail = "rectified point misses the slice: sigma = " + std::to_string(slice_sigma);
    return out;
  }
  return out;
}

namespace {

Vector require_ok(const RectifyOutcome& o, const char* what, double* t_out = nullptr) {
  if (!o.ok()) throw DomainFailure(std::string(what) + ": " + o.detail);
  if (t_out) *t_out = o.t;
  return o.point;
}

}  // namespace

SandwichMaps::SandwichMaps(LevelSetChart lsc, ScalarField sigma, SandwichOptions opts,
                           const std::optional<Box>& sample_box)
    : lsc_(std::move(lsc)), sigma_(std::move(sigma)), opts_(opts) {
  const ContactSystem& sys = lsc_.system();
  const int dim = sys.dim();
  const int sdim = dim - 1;

  flow_c_ = opts_.flow.with_box(sys.chart.box);
  flow_s_ = opts_.flow.with_box(lsc_.surface().box);

  h_on_c_ = sys.hamiltonian;

  {
    LevelSetChart chart = lsc_;
    z_field_.value = [chart](const Vector& u) {
      return Vector(restricted_field(chart, u) / chart.xi_h(u));
    };
  }

  // Constant-xi(H) precondition on a sample grid of the ambient chart.
  const Box cbox = sample_box ? *sample_box : Box::cube(dim, 1.0);
  {
    Vector center = 0.5 * (cbox.lo + cbox.hi);
    gamma_ = xi_of_h(sys, center);
    double dev = 0.0;
    std::vector<int> idx(dim, 0);
    const int g = opts_.grid_per_axis;
    while (true) {
      Vector x(dim);
      for (int i = 0; i < dim; ++i)
        x[i] = cbox.lo[i] + (g == 1 ? 0.5 : static_cast<double>(idx[i]) / (g - 1)) *
                                (cbox.hi[i] - cbox.lo[i]);
      dev = std::max(dev, std::abs(xi_of_h(sys, x) - gamma_));
      int axis = 0;
      while (axis < dim && ++idx[axis] == g) idx[axis++] = 0;
      if (axis == dim) break;
    }
    constant_xi_ok_ = dev <= opts_.constant_xi_tol && gamma_ != 0.0;
  }

  // sigma must solve the surface transport equation before phi2 means anything.
  {
    Box sbox = Box::cube(sdim, 1.0);
    if (sample_box) {
      sbox.lo = sample_box->lo.tail(sdim);
      sbox.hi = sample_box->hi.tail(sdim);
    }
    std::vector<int> idx(sdim, 0);
    const int g = opts_.grid_per_axis;
    while (true) {
      Vector u(sdim);
      for (int i = 0; i < sdim; ++i)
        u[i] = sbox.lo[i] + (g == 1 ? 0.5 : static_cast<double>(idx[i]) / (g - 1)) *
                                (sbox.hi[i] - sbox.lo[i]);
      max_sigma_residual_ = std::max(max_sigma_residual_, std::abs(sigma_residual_s(lsc_, sigma_, u)));
      int axis = 0;
      while (axis < sdim && ++idx[axis] == g) idx[axis++] = 0;
      if (axis == sdim) break;
    }
    sigma_ok_ = max_sigma_residual_ <= opts_.sigma_residual_tol;

    // Slice coordinate: drop the best-conditioned direction of d sigma at
    // the box center (first index wins ties).
    const Vector g0 = sigma_.grad(0.5 * (sbox.lo + sbox.hi));
    elim_axis_ = 0;
    for (int i = 1; i < sdim; ++i)
      if (std::abs(g0[i]) > std::abs(g0[elim_axis_])) elim_axis_ = i;
  }

  slice_chart_ = lsc_.surface().without_axis(elim_axis_, lsc_.surface().name + "/slice");

  contactified_ = contactification(lsc_.surface(), induced_theta_field(lsc_),
                                   sys.chart.box.hi[0]);
  symplectified_ = symplectification(slice_chart_, eta_b_field(), -1.0);
}

RectifyOutcome SandwichMaps::phi1(const Vector& y) const {
  if (!constant_xi_ok_) {
    RectifyOutcome out;
    out.status = RectifyStatus::precondition_failed;
    out.detail = "xi(H) is not constant on the sample grid";
    return out;
  }
  return rectify(reeb_field(lsc_.system()), h_on_c_, gamma_, y, flow_c_);
}

RectifyOutcome SandwichMaps::phi2(const Vector& u) const {
  if (!sigma_ok_) {
    RectifyOutcome out;
    out.status = RectifyStatus::precondition_failed;
    out.detail = "sigma residual " + std::to_string(max_sigma_residual_) +
                 " exceeds tolerance on the sample grid";
    return out;
  }
  return rectify(z_field_, sigma_, static_cast<double>(lsc_.dof()), u, flow_s_);
}

Vector SandwichMaps::surface_to_slice(const Vector& u_on_b) const {
  return drop_coordinate(u_on_b, elim_axis_);
}

Vector SandwichMaps::slice_to_surface(const Vector& b) const {
  Vector u = insert_coordinate(b, elim_axis_, 0.0);
  for (int it = 0; it < 50; ++it) {
    const double s = sigma_.value(u);
    const double ds = sigma_.grad(u)[elim_axis_];
    if (std::abs(ds) < 1e-10)
      throw NumericalError("slice_to_surface: sigma-gradient degenerate, no slice chart here");
    u[elim_axis_] -= s / ds;
    if (std::abs(s) <= 1e-12) return u;
  }
  throw NumericalError("slice_to_surface: Newton did not converge");
}

PointMap SandwichMaps::slice_inclusion() const {
  PointMap map;
  map.source_dim = slice_chart_.dim();
  map.target_dim = lsc_.surface().dim();
  const ScalarField sigma = sigma_;
  const int elim = elim_axis_;
  auto solve = [sigma, elim](const Vector& b) {
    Vector u = insert_coordinate(b, elim, 0.0);
    for (int it = 0; it < 50; ++it) {
      const double s = sigma.value(u);
      const double ds = sigma.grad(u)[elim];
      if (std::abs(ds) < 1e-10)
        throw NumericalError("slice inclusion: sigma-gradient degenerate");
      u[elim] -= s / ds;
      if (std::abs(s) <= 1e-12) return u;
    }
    throw NumericalError("slice inclusion: Newton did not converge");
  };
  map.value = solve;
  map.jacobian = [sigma, elim, solve](const Vector& b) {
    const Vector u = solve(b);
    const Vector g = sigma.grad(u);
    const int sdim = static_cast<int>(u.size());
    Matrix jac = Matrix::Zero(sdim, sdim - 1);
    int col = 0;
    for (int row = 0; row < sdim; ++row) {
      if (row == elim) continue;
      jac(row, col) = 1.0;
      jac(elim, col) = -g[row] / g[elim];
      ++col;
    }
    return jac;
  };
  return map;
}

KForm SandwichMaps::eta_b(const Vector& b) const {
  const PointMap into_c = compose(lsc_.inclusion_map(), slice_inclusion());
  return pullback(into_c, lsc_.system().eta.value(into_c.value(b)), b,
                  lsc_.system().diff);
}

FormField SandwichMaps::eta_b_field() const {
  FormField out;
  out.degree = 1;
  out.domain = slice_chart_.box;
  const PointMap into_c = compose(lsc_.inclusion_map(), slice_inclusion());
  const FormField eta = lsc_.system().eta;
  const DiffOptions diff = lsc_.system().diff;
  out.value = [into_c, eta, diff](const Vector& b) {
    return pullback(into_c, eta.value(into_c.value(b)), b, diff);
  };
  return out;
}

double SandwichMaps::eta_b_contact_value(const Vector& b) const {
  const FormField field = eta_b_field();
  const KForm w = field.value(b);
  const KForm dw = exterior_derivative(field, b, {opts_.form_step, false});
  return top_coefficient(wedge(w, wedge_power(dw, lsc_.dof() - 1)));
}

PointMap SandwichMaps::phi1_map() const {
  PointMap map;
  map.source_dim = lsc_.system().dim();
  map.target_dim = contactified_.chart.dim();
  const SandwichMaps self = *this;
  map.value = [self](const Vector& y) {
    RectifyOutcome o = self.phi1(y);
    const Vector on_s = require_ok(o, "phi1");
    return insert_coordinate(drop_coordinate(on_s, 0), 0, o.t);
  };
  return map;
}

PointMap SandwichMaps::phi2_map() const {
  PointMap map;
  map.source_dim = lsc_.surface().dim();
  map.target_dim = symplectified_.chart.dim();
  const SandwichMaps self = *this;
  map.value = [self](const Vector& u) {
    RectifyOutcome o = self.phi2(u);
    const Vector on_b = require_ok(o, "phi2");
    return insert_coordinate(self.surface_to_slice(on_b), 0, o.t);
  };
  return map;
}

double SandwichMaps::phi1_pullback_residual(const Vector& y) const {
  const PointMap map = phi1_map();
  const KForm target = contactified_.form.value(map.value(y));
  const KForm pulled = pullback(map, target, y, {opts_.jacobian_step, false});
  return (pulled - lsc_.system().eta.value(y)).max_abs();
}

double SandwichMaps::phi1_speed_residual(const Vector& y) const {
  const PointMap map = phi1_map();
  const Matrix jac = map.jac(y, {opts_.jacobian_step, false});
  Vector unit = Vector::Zero(jac.rows());
  unit[0] = 1.0;
  return (jac * reeb(lsc_.system(), y) - unit).cwiseAbs().maxCoeff();
}

double SandwichMaps::phi2_pullback_residual(const Vector& u) const {
  const PointMap map = phi2_map();
  const KForm target = symplectified_.form.value(map.value(u));
  const KForm pulled = pullback(map, target, u, {opts_.jacobian_step, false});
  return (pulled - induced(lsc_, u).omega).max_abs();
}

double SandwichMaps::phi2_speed_residual(const Vector& u) const {
  const PointMap map = phi2_map();
  const Matrix jac = map.jac(u, {opts_.jacobian_step, false});
  Vector target = Vector::Zero(jac.rows());
  target[0] = gamma_;
  return (jac * restricted_field(lsc_, u) - target).cwiseAbs().maxCoeff();
}

double SandwichMaps::composite_pullback_residual(const Vector& y) const {
  PointMap map;
  map.source_dim = lsc_.system().dim();
  map.target_dim = lsc_.system().dim();
  const SandwichMaps self = *this;
  map.value = [self](const Vector& yy) {
    RectifyOutcome o1 = self.phi1(yy);
    const Vector on_s = require_ok(o1, "phi1");
    RectifyOutcome o2 = self.phi2(drop_coordinate(on_s, 0));
    const Vector on_b = require_ok(o2, "phi2");
    Vector out(self.lsc_.system().dim());
    out[0] = o1.t;
    out[1] = o2.t;
    out.tail(out.size() - 2) = self.surface_to_slice(on_b);
    return out;
  };
  // Target contact form dz + exp(-s) eta_B on the doubly extended chart.
  const FormField etab = eta_b_field();
  auto target_at = [etab](const Vector& x) {
    KForm lifted = lift_leading_axis(lift_leading_axis(etab.value(x.tail(x.size() - 2))));
    lifted *= std::exp(-x[1]);
    lifted.coefficients()[0] += 1.0;
    return lifted;
  };
  const KForm pulled = pullback(map, target_at(map.value(y)), y, {opts_.jacobian_step, false});
  return (pulled - lsc_.system().eta.value(y)).max_abs();
}

double SandwichMaps::roundtrip_residual_phi2(const Vector& u) const {
  RectifyOutcome o = phi2(u);
  const Vector on_b = require_ok(o, "phi2");
  FlowOptions fo = flow_s_;
  fo.record_samples = false;
  const FlowOutcome back = integrate(z_field_, on_b, o.t, fo);
  if (!back.complete()) throw DomainFailure("roundtrip: return flow " + std::string(to_string(back.status)));
  return (back.final_point() - u).cwiseAbs().maxCoeff();
}

double SandwichMaps::rectified_field_residual(const Vector& u) const {
  const PointMap map = phi2_map();
  const Matrix jac = map.jac(u, {opts_.jacobian_step, false});
  Vector unit = Vector::Zero(jac.rows());
  unit[0] = 1.0;
  return (jac * z_field_.value(u) - unit).cwiseAbs().maxCoeff();
}

double SandwichMaps::sigma_transport_residual(const Vector& u, double t) const {
  FlowOptions fo = flow_s_;
  fo.record_samples = false;
  const FlowOutcome flow = integrate(z_field_, u, t, fo);
  if (!flow.complete())
    throw DomainFailure("sigma transport: flow " + std::string(to_string(flow.status)));
  return std::abs(sigma_.value(flow.final_point()) -
                  (lsc_.dof() * t + sigma_.value(u)));
}

}  // namespace contactflow
