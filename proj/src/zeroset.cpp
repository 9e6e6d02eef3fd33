#include "contactflow/zeroset.hpp"

#include <cmath>

namespace contactflow {

struct LevelSetChart::State {
  ContactSystem sys;
  Chart surface;
  double tol_h;
  int max_iterations;
  mutable std::optional<double> warm_z;
};

LevelSetChart::LevelSetChart(ContactSystem sys, double tol_h, int max_iterations) {
  if (sys.chart.axes.empty() || sys.chart.axes[0] != "z")
    throw std::invalid_argument("LevelSetChart: chart must have the graph coordinate z first");
  auto state = std::make_shared<State>();
  state->surface = sys.chart.without_axis(0, sys.chart.name + "/zeroset");
  state->sys = std::move(sys);
  state->tol_h = tol_h;
  state->max_iterations = max_iterations;
  s_ = std::move(state);
}

const ContactSystem& LevelSetChart::system() const { return s_->sys; }
const Chart& LevelSetChart::surface() const { return s_->surface; }
int LevelSetChart::dof() const { return s_->sys.n; }
void LevelSetChart::reset_warm_start() const { s_->warm_z.reset(); }

double LevelSetChart::height(const Vector& u, std::optional<double> z0) const {
  const ContactSystem& sys = s_->sys;
  double z = z0 ? *z0 : s_->warm_z.value_or(0.0);
  Vector x = insert_coordinate(u, 0, z);
  for (int it = 0; it < s_->max_iterations; ++it) {
    x[0] = z;
    const double h = sys.hamiltonian.value(x);
    const double hz = sys.hamiltonian.grad(x, sys.diff)[0];
    if (std::abs(hz) < 1e-8)
      throw NumericalError("LevelSetChart::height: transversality failure (xi(H) ~ 0)");
    z -= h / hz;
    if (std::abs(h) <= s_->tol_h) {
      // One polishing step so downstream differencing sees the graph at
      // round-off accuracy rather than at the Newton tolerance.
      x[0] = z;
      const double hp = sys.hamiltonian.value(x);
      const double hzp = sys.hamiltonian.grad(x, sys.diff)[0];
      if (std::abs(hzp) >= 1e-8) z -= hp / hzp;
      s_->warm_z = z;
      return z;
    }
  }
  throw NumericalError("LevelSetChart::height: no convergence in " +
                       std::to_string(s_->max_iterations) + " iterations");
}

Vector LevelSetChart::include(const Vector& u) const {
  return insert_coordinate(u, 0, height(u));
}

Vector LevelSetChart::height_gradient(const Vector& u) const {
  const Vector x = include(u);
  const Vector g = s_->sys.hamiltonian.grad(x, s_->sys.diff);
  return -g.tail(g.size() - 1) / g[0];
}

Matrix LevelSetChart::inclusion_jacobian(const Vector& u) const {
  const int m = static_cast<int>(u.size());
  Matrix jac(m + 1, m);
  jac.row(0) = height_gradient(u).transpose();
  jac.bottomRows(m) = Matrix::Identity(m, m);
  return jac;
}

PointMap LevelSetChart::inclusion_map() const {
  PointMap map;
  map.source_dim = s_->surface.dim();
  map.target_dim = s_->sys.dim();
  LevelSetChart self = *this;  // shares state
  map.value = [self](const Vector& u) { return self.include(u); };
  map.jacobian = [self](const Vector& u) { return self.inclusion_jacobian(u); };
  return map;
}

double LevelSetChart::xi_h(const Vector& u) const {
  const Vector x = include(u);
  return reeb(s_->sys, x).dot(s_->sys.hamiltonian.grad(x, s_->sys.diff));
}

Matrix two_form_matrix(const KForm& w) {
  if (w.degree() != 2) throw std::invalid_argument("two_form_matrix: degree != 2");
  const int d = w.dim();
  Matrix m = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double c = w.coefficient({i, j});
      m(i, j) = c;
      m(j, i) = -c;
    }
  return m;
}

FormField induced_theta_field(const LevelSetChart& lsc) {
  FormField theta;
  theta.degree = 1;
  theta.domain = lsc.surface().box;
  const PointMap psi = lsc.inclusion_map();
  const FormField eta = lsc.system().eta;
  const DiffOptions diff = lsc.system().diff;
  theta.value = [psi, eta, diff](const Vector& u) {
    return pullback(psi, eta.value(psi.value(u)), u, diff);
  };
  return theta;
}

InducedStructure induced(const LevelSetChart& lsc, const Vector& u, double omega_det_tol) {
  InducedStructure out;
  const FormField theta = induced_theta_field(lsc);
  out.theta = theta.value(u);
  out.omega = exterior_derivative(theta, u, lsc.system().diff);
  const Matrix w = two_form_matrix(out.omega);
  out.omega_det = w.determinant();
  if (std::abs(out.omega_det) <= omega_det_tol)
    throw NumericalError("induced: d theta is degenerate on the surface chart");
  // theta_j = sum_i W_ij Delta_i, i.e. W^T Delta = theta.
  out.liouville = w.transpose().partialPivLu().solve(out.theta.coefficients());
  out.liouville_residual =
      (w.transpose() * out.liouville - out.theta.coefficients()).cwiseAbs().maxCoeff();
  return out;
}

VectorField liouville_vector_field(const LevelSetChart& lsc) {
  VectorField out;
  LevelSetChart self = lsc;
  out.value = [self](const Vector& u) { return induced(self, u).liouville; };
  return out;
}

Vector restricted_field(const LevelSetChart& lsc, const Vector& u) {
  const Vector x = lsc.include(u);
  const Vector xh = hamiltonian_field(lsc.system(), x);
  const Vector tangential = xh.tail(xh.size() - 1);
  const double graph_rate = lsc.height_gradient(u).dot(tangential);
  const double scale = std::max(1.0, xh.cwiseAbs().maxCoeff());
  if (std::abs(xh[0] - graph_rate) > 1e-8 * scale)
    throw NumericalError("restricted_field: tangency check failed (surface or derivative bug)");
  return tangential;
}

VectorField restricted_vector_field(const LevelSetChart& lsc) {
  VectorField out;
  LevelSetChart self = lsc;
  out.value = [self](const Vector& u) { return restricted_field(self, u); };
  return out;
}

double sigma_residual_s(const LevelSetChart& lsc, const ScalarField& sigma, const Vector& u) {
  const Vector field = restricted_field(lsc, u);
  return field.dot(sigma.grad(u, lsc.system().diff)) - lsc.dof() * lsc.xi_h(u);
}

double measure_density_s(const LevelSetChart& lsc, const ScalarField& sigma, const Vector& u) {
  const double xih = lsc.xi_h(u);
  if (xih == 0.0) throw NumericalError("measure_density_s: xi(H) = 0 on the surface");
  const InducedStructure ind = induced(lsc, u);
  const double top = top_coefficient(wedge_power(ind.omega, lsc.dof()));
  return std::exp(sigma.value(u)) / xih * top;
}

std::vector<Vector> find_equilibria(const LevelSetChart& lsc, const Box& search_box,
                                    int grid_per_axis, double root_tol) {
  const int d = search_box.dim();
  std::vector<Vector> roots;
  const VectorField field = restricted_vector_field(lsc);

  auto try_newton = [&](Vector u) {
    for (int it = 0; it < 60; ++it) {
      Vector f;
      try {
        f = field.value(u);
      } catch (const NumericalError&) {
        return;
      }
      if (!f.allFinite()) return;
      if (f.cwiseAbs().maxCoeff() <= root_tol) {
        if (!search_box.contains(u)) return;
        for (const auto& r : roots)
          if ((r - u).cwiseAbs().maxCoeff() < 1e-6) return;
        roots.push_back(u);
        return;
      }
      const Matrix jac = fd_jacobian(field.value, u, {1e-6, false});
      Eigen::PartialPivLU<Matrix> lu(jac);
      if (lu.rcond() < 1e-14) return;
      const Vector step = lu.solve(f);
      if (!step.allFinite()) return;
      u -= step;
      // Seeds whose iterates leave the (doubled) search region are abandoned.
      if (!search_box.inflated(2.0).contains(u)) return;
    }
  };

  std::vector<int> idx(d, 0);
  const int npts = grid_per_axis;
  while (true) {
    Vector seed(d);
    for (int i = 0; i < d; ++i) {
      const double f = npts == 1 ? 0.5 : static_cast<double>(idx[i]) / (npts - 1);
      seed[i] = search_box.lo[i] + f * (search_box.hi[i] - search_box.lo[i]);
    }
    try_newton(seed);
    int axis = 0;
    while (axis < d && ++idx[axis] == npts) idx[axis++] = 0;
    if (axis == d) break;
  }
  return roots;
}

}  // namespace contactflow
