#include "contactflow/scenarios.hpp"

#include <cmath>

namespace contactflow {

Potential make_potential(const std::string& name, int dof) {
  Potential v;
  v.name = name;
  if (name == "linear") {
    v.value = [](const Vector& q) { return q.sum(); };
    v.gradient = [](const Vector& q) { return Vector::Ones(q.size()).eval(); };
    v.hessian = [](const Vector& q) { return Matrix::Zero(q.size(), q.size()).eval(); };
  } else if (name == "harmonic") {
    v.value = [](const Vector& q) { return 0.5 * q.squaredNorm(); };
    v.gradient = [](const Vector& q) { return q; };
    v.hessian = [](const Vector& q) { return Matrix::Identity(q.size(), q.size()).eval(); };
  } else if (name == "cubic") {
    v.value = [](const Vector& q) {
      double s = 0.0;
      for (int i = 0; i < q.size(); ++i) s += q[i] * q[i] * q[i] / 3.0 + q[i];
      return s;
    };
    v.gradient = [](const Vector& q) {
      Vector g(q.size());
      for (int i = 0; i < q.size(); ++i) g[i] = q[i] * q[i] + 1.0;
      return g;
    };
    v.hessian = [](const Vector& q) {
      Matrix h = Matrix::Zero(q.size(), q.size());
      for (int i = 0; i < q.size(); ++i) h(i, i) = 2.0 * q[i];
      return h;
    };
  } else {
    throw std::invalid_argument("make_potential: unknown potential '" + name + "'");
  }
  (void)dof;
  return v;
}

namespace {

Vector q_block(const Vector& x, int n, bool has_z) {
  Vector q(n);
  for (int i = 0; i < n; ++i) q[i] = has_z ? x[q_axis(i)] : x[sq_axis(i)];
  return q;
}

Vector p_block(const Vector& x, int n, bool has_z) {
  Vector p(n);
  for (int i = 0; i < n; ++i) p[i] = has_z ? x[p_axis(i)] : x[sp_axis(i)];
  return p;
}

void probe(bool ok, const std::string& what) {
  if (!ok) throw std::logic_error("scenario self-consistency probe failed: " + what);
}

}  // namespace

DissipativeScenario dissipative_scenario(double gamma, const std::string& potential,
                                         double box_halfwidth) {
  if (gamma == 0.0)
    throw std::invalid_argument("dissipative_scenario: gamma must be nonzero");
  DissipativeScenario sc;
  const int n = sc.n;
  sc.gamma = gamma;
  sc.potential = make_potential(potential, n);
  const Potential V = sc.potential;

  sc.system.chart = darboux_chart(n, box_halfwidth, "dissipative");
  sc.system.n = n;
  sc.system.eta = darboux_eta(n);
  sc.system.eta.domain = sc.system.chart.box;
  sc.system.hamiltonian.value = [gamma, V, n](const Vector& x) {
    return 0.5 * p_block(x, n, true).squaredNorm() + V.value(q_block(x, n, true)) + gamma * x[0];
  };
  sc.system.hamiltonian.gradient = [gamma, V, n](const Vector& x) {
    Vector g(2 * n + 1);
    g[0] = gamma;
    const Vector vq = V.gradient(q_block(x, n, true));
    for (int i = 0; i < n; ++i) {
      g[q_axis(i)] = vq[i];
      g[p_axis(i)] = x[p_axis(i)];
    }
    return g;
  };

  sc.x_h.value = [gamma, V, n](const Vector& x) {
    const Vector q = q_block(x, n, true), p = p_block(x, n, true);
    const Vector vq = V.gradient(q);
    Vector f(2 * n + 1);
    f[0] = 0.5 * p.squaredNorm() - V.value(q) - gamma * x[0];
    for (int i = 0; i < n; ++i) {
      f[q_axis(i)] = p[i];
      f[p_axis(i)] = -vq[i] - gamma * p[i];
    }
    return f;
  };
  sc.x_h.jacobian = [gamma, V, n](const Vector& x) {
    const Vector q = q_block(x, n, true), p = p_block(x, n, true);
    const Vector vq = V.gradient(q);
    const Matrix vqq = V.hessian(q);
    Matrix a = Matrix::Zero(2 * n + 1, 2 * n + 1);
    a(0, 0) = -gamma;
    for (int i = 0; i < n; ++i) {
      a(0, q_axis(i)) = -vq[i];
      a(0, p_axis(i)) = p[i];
      a(q_axis(i), p_axis(i)) = 1.0;
      for (int j = 0; j < n; ++j) a(p_axis(i), q_axis(j)) = -vqq(i, j);
      a(p_axis(i), p_axis(i)) -= gamma;
    }
    return a;
  };

  sc.x_h_restricted.value = [gamma, V, n](const Vector& u) {
    const Vector q = q_block(u, n, false), p = p_block(u, n, false);
    const Vector vq = V.gradient(q);
    Vector f(2 * n);
    for (int i = 0; i < n; ++i) {
      f[sq_axis(i)] = p[i];
      f[sp_axis(i)] = -vq[i] - gamma * p[i];
    }
    return f;
  };
  sc.x_h_restricted.jacobian = [gamma, V, n](const Vector& u) {
    const Matrix vqq = V.hessian(q_block(u, n, false));
    Matrix a = Matrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
      a(sq_axis(i), sp_axis(i)) = 1.0;
      for (int j = 0; j < n; ++j) a(sp_axis(i), sq_axis(j)) = -vqq(i, j);
      a(sp_axis(i), sp_axis(i)) -= gamma;
    }
    return a;
  };

  sc.height_closed = [gamma, V, n](const Vector& u) {
    return -(0.5 * p_block(u, n, false).squaredNorm() + V.value(q_block(u, n, false))) / gamma;
  };

  if (potential == "linear") {
    ScalarField sigma;
    sigma.value = [gamma, n](const Vector& u) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        s += -gamma * u[sp_axis(i)] - gamma * gamma * u[sq_axis(i)];
      return s;
    };
    sigma.gradient = [gamma, n](const Vector& u) {
      Vector g(2 * n);
      for (int i = 0; i < n; ++i) {
        g[sq_axis(i)] = -gamma * gamma;
        g[sp_axis(i)] = -gamma;
      }
      (void)u;
      return g;
    };
    sc.sigma = sigma;

    sc.surface_flow = [gamma, n](double t, const Vector& u) {
      Vector out(2 * n);
      const double decay = std::exp(-gamma * t);
      for (int i = 0; i < n; ++i) {
        const double q = u[sq_axis(i)], p = u[sp_axis(i)];
        out[sq_axis(i)] = q + (p + 1.0 / gamma) * (1.0 - decay) / gamma - t / gamma;
        out[sp_axis(i)] = (p + 1.0 / gamma) * decay - 1.0 / gamma;
      }
      return out;
    };
    sc.surface_flow_jacobian = [gamma, n](double t, const Vector&) {
      Matrix jac = Matrix::Zero(2 * n, 2 * n);
      const double decay = std::exp(-gamma * t);
      for (int i = 0; i < n; ++i) {
        jac(sq_axis(i), sq_axis(i)) = 1.0;
        jac(sq_axis(i), sp_axis(i)) = (1.0 - decay) / gamma;
        jac(sp_axis(i), sp_axis(i)) = decay;
      }
      return jac;
    };

    const ScalarField h_field = sc.system.hamiltonian;
    sc.phi1_closed = [gamma, h_field](const Vector& y) {
      return std::make_pair(h_field.value(y) / gamma, Vector(y.tail(y.size() - 1)));
    };

    const auto flow = sc.surface_flow;
    sc.phi2_closed = [gamma, sigma, flow, n](const Vector& u) {
      const double s = sigma.value(u) / n;       // = gamma F
      const double f = sigma.value(u) / (n * gamma);
      return std::make_pair(s, flow(-f, u));
    };

    // Slice chart (p1, q2, p2) after eliminating q1; valid whenever the
    // elimination rule picks q1 (gamma >= 1 for this sigma).
    sc.eta_b_closed = [gamma](const Vector& b) {
      const double p1 = b[0], p2 = b[2];
      Vector c(3);
      c[0] = 1.0 / (gamma * gamma);                          // dp1
      c[1] = p1 - p2;                                        // dq2
      c[2] = (p1 - p2) / gamma + 1.0 / (gamma * gamma);      // dp2
      return KForm::covector(c);
    };

    // Construction-time probes: each supplied oracle must satisfy its own
    // defining identity before anything downstream trusts it.
    {
      auto rng_pt = [](int k, int d) {
        Vector u(d);
        for (int i = 0; i < d; ++i)
          u[i] = std::sin(0.7 * (k + 1) * (i + 2));  // fixed quasi-random probe points
        return u;
      };
      for (int k = 0; k < 10; ++k) {
        const Vector u = rng_pt(k, 2 * n);
        // Closed flow solves the restricted equations (fourth-order check in t).
        const double t0 = 0.3 * std::cos(k + 1.0), h = 1e-3;
        Vector d_num = (-sc.surface_flow(t0 + 2 * h, u) + 8.0 * sc.surface_flow(t0 + h, u) -
                        8.0 * sc.surface_flow(t0 - h, u) + sc.surface_flow(t0 - 2 * h, u)) /
                       (12.0 * h);
        const Vector d_field = sc.x_h_restricted.value(sc.surface_flow(t0, u));
        probe((d_num - d_field).cwiseAbs().maxCoeff() <= 1e-8, "closed flow vs field");
        // sigma solves the transport equation at rate n gamma.
        probe(std::abs(sc.x_h_restricted.value(u).dot(sigma.gradient(u)) - n * gamma) <= 1e-10,
              "sigma transport rate");
      }
      for (int k = 0; k < 5; ++k) {
        const Vector u = rng_pt(17 + k, 2 * n);
        const auto [s, on_b] = sc.phi2_closed(u);
        probe(std::abs(sigma.value(on_b)) <= 1e-9, "phi2 lands on the sigma slice");
        probe(std::abs(s - sigma.value(u) / n) <= 1e-12, "phi2 first slot");
        Vector y(2 * n + 1);
        y[0] = 0.4 * std::sin(k + 2.0);
        y.tail(2 * n) = u;
        const auto [z, us] = sc.phi1_closed(y);
        Vector on_s(2 * n + 1);
        on_s[0] = y[0] - z;
        on_s.tail(2 * n) = us;
        probe(std::abs(sc.system.hamiltonian.value(on_s)) <= 1e-9, "phi1 lands on the zero set");
      }
    }
  }
  return sc;
}

void SamplerScenario::require_outside_tube(const Vector& x) const {
  if (p_block(x, dof, false).norm() < exclusion_radius)
    throw NumericalError(
        "sampler: evaluation inside the excluded tube around the zero section");
}

SamplerScenario cotangent_sampler(const std::string& metric, int dof, double exclusion_radius,
                                  double box_halfwidth) {
  SamplerScenario sc;
  sc.dof = dof;
  sc.metric = metric;
  sc.exclusion_radius = exclusion_radius;

  sc.chart.name = "cotangent-sampler";
  for (int i = 1; i <= dof; ++i) {
    sc.chart.axes.push_back("q" + std::to_string(i));
    sc.chart.axes.push_back("p" + std::to_string(i));
  }
  sc.chart.box = Box::cube(2 * dof, box_halfwidth);

  // Diagonal metrics only; coefficient handles with analytic derivative.
  std::function<double(double)> gii, dgii;
  if (metric == "identity") {
    gii = [](double) { return 1.0; };
    dgii = [](double) { return 0.0; };
  } else if (metric == "diagonal") {
    gii = [](double q) { const double s = std::sin(q); return 1.0 + 0.5 * s * s; };
    dgii = [](double q) { return 0.5 * std::sin(2.0 * q); };
  } else {
    throw std::invalid_argument("cotangent_sampler: unknown metric '" + metric + "'");
  }

  sc.lambda.degree = 1;
  sc.lambda.value = [dof](const Vector& x) {
    Vector c = Vector::Zero(2 * dof);
    for (int i = 0; i < dof; ++i) c[sq_axis(i)] = x[sp_axis(i)];
    return KForm::covector(c);
  };
  sc.lambda.derivative = [dof](const Vector&) {
    KForm out(2 * dof, 2);
    for (int i = 0; i < dof; ++i) out.set_coefficient({sq_axis(i), sp_axis(i)}, -1.0);
    return out;
  };

  sc.kinetic.value = [dof, gii](const Vector& x) {
    double k = 0.0;
    for (int i = 0; i < dof; ++i) {
      const double p = x[sp_axis(i)];
      k += 0.5 * p * p / gii(x[sq_axis(i)]);
    }
    return k;
  };
  sc.kinetic.gradient = [dof, gii, dgii](const Vector& x) {
    Vector g = Vector::Zero(2 * dof);
    for (int i = 0; i < dof; ++i) {
      const double q = x[sq_axis(i)], p = x[sp_axis(i)], gq = gii(q);
      g[sq_axis(i)] = -0.5 * p * p * dgii(q) / (gq * gq);
      g[sp_axis(i)] = p / gq;
    }
    return g;
  };

  // F(q) = |q|^2 / (2 n) corresponds to the Gaussian target rho = exp(-n F).
  sc.f_of_q.value = [dof](const Vector& x) {
    return 0.5 * q_block(x, dof, false).squaredNorm() / dof;
  };
  sc.f_of_q.gradient = [dof](const Vector& x) {
    Vector g = Vector::Zero(2 * dof);
    for (int i = 0; i < dof; ++i) g[sq_axis(i)] = x[sq_axis(i)] / dof;
    return g;
  };

  const ScalarField K = sc.kinetic;
  const ScalarField F = sc.f_of_q;
  SamplerScenario guard = sc;  // chart/dof/radius only, for the tube check
  sc.sigma.value = [K, F, guard](const Vector& x) {
    guard.require_outside_tube(x);
    return 0.5 * std::log(K.value(x)) + F.value(x);
  };
  sc.sigma.gradient = [K, F, guard](const Vector& x) {
    guard.require_outside_tube(x);
    return Vector(0.5 / K.value(x) * K.gradient(x) + F.gradient(x));
  };

  sc.dilation.value = [dof](const Vector& x) {
    Vector v = Vector::Zero(2 * dof);
    for (int i = 0; i < dof; ++i) v[sp_axis(i)] = x[sp_axis(i)];
    return v;
  };
  sc.dilation.jacobian = [dof](const Vector&) {
    Matrix jac = Matrix::Zero(2 * dof, 2 * dof);
    for (int i = 0; i < dof; ++i) jac(sp_axis(i), sp_axis(i)) = 1.0;
    return jac;
  };

  const FormField lambda = sc.lambda;
  sc.density = [K, F, guard, lambda, dof](const Vector& x) {
    guard.require_outside_tube(x);
    const double top = top_coefficient(wedge_power(lambda.derivative(x), dof));
    return std::pow(K.value(x), -0.5 * dof) * std::exp(-dof * F.value(x)) * std::abs(top);
  };

  // Construction probes: the dilation rates that make the measure work.
  for (int k = 0; k < 10; ++k) {
    Vector x(2 * dof);
    for (int i = 0; i < 2 * dof; ++i) x[i] = 0.8 + 0.3 * std::sin(1.3 * (k + 1) * (i + 1));
    const Vector delta = sc.dilation.value(x);
    const double dk = delta.dot(sc.kinetic.gradient(x));
    probe(std::abs(dk - 2.0 * sc.kinetic.value(x)) <= 1e-12 * std::max(1.0, dk),
          "dilation doubles the kinetic energy");
    probe(std::abs(delta.dot(sc.sigma.gradient(x)) - 1.0) <= 1e-12, "sigma has unit dilation rate");
  }
  return sc;
}

ContactSystem contactify(const Chart& base, const FormField& lambda) {
  if (base.dim() % 2 != 0)
    throw std::invalid_argument("contactify: base chart must be even-dimensional");
  const ChartedForm cf = contactification(base, lambda);
  ContactSystem sys;
  sys.chart = cf.chart;
  sys.n = base.dim() / 2;
  sys.eta = cf.form;
  sys.eta.domain = cf.chart.box;
  const int d = cf.chart.dim();
  sys.hamiltonian.value = [](const Vector&) { return -1.0; };
  sys.hamiltonian.gradient = [d](const Vector&) { return Vector::Zero(d).eval(); };
  return sys;
}

ChartedForm symplectify(const Chart& base, const FormField& eta, double c) {
  return symplectification(base, eta, c);
}

EnergyLevelDemo energy_level_demo(double box_halfwidth) {
  EnergyLevelDemo demo;
  const double r = std::sqrt(2.0);  // |p| on the unit kinetic-energy level

  Chart chart;
  chart.name = "energy-level";
  chart.axes = {"q1", "q2", "phi"};
  chart.box = Box::cube(3, box_halfwidth);

  FormField eta;
  eta.degree = 1;
  eta.value = [r](const Vector& x) {
    Vector c(3);
    c[0] = r * std::cos(x[2]);
    c[1] = r * std::sin(x[2]);
    c[2] = 0.0;
    return KForm::covector(c);
  };
  eta.derivative = [r](const Vector& x) {
    KForm d(3, 2);
    d.set_coefficient({0, 2}, r * std::sin(x[2]));   // d(cos phi) ^ dq1 contribution
    d.set_coefficient({1, 2}, -r * std::cos(x[2]));
    return d;
  };

  demo.system.chart = chart;
  demo.system.n = 1;
  demo.system.eta = eta;
  demo.system.eta.domain = chart.box;
  demo.system.hamiltonian.value = [](const Vector&) { return -1.0; };
  demo.system.hamiltonian.gradient = [](const Vector&) { return Vector::Zero(3).eval(); };

  // Restricted symplectic dynamics over the Liouville rate: (p1, p2, 0) / |p|^2.
  demo.expected_reeb.value = [r](const Vector& x) {
    Vector v(3);
    v[0] = r * std::cos(x[2]) / (r * r);
    v[1] = r * std::sin(x[2]) / (r * r);
    v[2] = 0.0;
    return v;
  };
  return demo;
}

}  // namespace contactflow
