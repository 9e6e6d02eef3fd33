#include "contactflow/suites.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

namespace contactflow {

namespace {

struct IdentitySpec {
  const char* ref;
  const char* quote;
  double threshold;
};

// Thresholds are the pinned defaults; a config may override per ref.
const IdentitySpec kContact[] = {
    {"reeb-defining", "eta(xi) = 1 and i_xi d eta = 0", 1e-10},
    {"reeb-darboux", "on (z, q, p): xi = d/dz", 1e-10},
    {"hamiltonian-dual-route", "bivector route equals the (z, q, p) component formula", 1e-8},
    {"hamiltonian-defining", "i_X d eta = dH - xi(H) eta and i_X eta = -H", 1e-7},
    {"energy-rate", "X_H(H) = -H xi(H)", 1e-6},
    {"eta-transport", "L_{X_H} eta = -xi(H) eta", 1e-6},
    {"volume-transport", "L_{X_H} nu = -(n+1) xi(H) nu", 1e-6},
    {"conformal-reeb", "the Reeb field of -eta/H is X_H where H != 0", 1e-7},
    {"conformal-volume-ratio", "conformal volume = (-1)^(n+1) / H^(n+1) times nu", 1e-8},
    {"jacobi-structure",
     "bracket antisymmetry, {f, -1} = xi(f), and the first-order product rule", 1e-8},
    {"conservative-limit", "z-independent H: X_H(H) = 0 and L_{X_H} nu = 0", 1e-6},
};

const IdentitySpec kZeroset[] = {
    {"surface-solve", "|H| on the solved graph z = zeta(q, p)", 1e-12},
    {"omega-nondegenerate", "|det d theta| >= 0.1 on the surface (shortfall reported)", 0.0},
    {"liouville-defining", "i_Delta d theta = theta (linear-solve residual)", 1e-9},
    {"tangency", "z-component of X_H equals the graph rate D zeta . X_u", 1e-8},
    {"liouville-reparam", "X_H|S = -xi(H) Delta, with Delta solved independently", 1e-7},
    {"liouville-expansion", "L_Delta d theta = d theta", 1e-6},
    {"sigma-residual", "X_H|S(sigma) = n xi(H)", 1e-12},
    {"sigma-residual-delta-form", "X_H|S(sigma) - n xi(H) = -xi(H) (Delta(sigma) + n)", 1e-8},
    {"equilibrium-obstruction",
     "a zero of X_H|S forbids any invariant measure on S (finding, not failure)", 1e-10},
};

const IdentitySpec kMeasure[] = {
    {"conformal-measure", "|H|^-(n+1) nu is invariant under the X_H flow on {H != 0}", 1e-6},
    {"surface-measure-closed-flow",
     "exp(sigma)/xi(H) (d theta)^n is invariant (closed-form flow oracle)", 1e-6},
    {"surface-measure-rk45", "exp(sigma)/xi(H) (d theta)^n is invariant (adaptive flow)", 1e-5},
    {"measure-equivalence",
     "Delta preserves exp(sigma)(d theta)^n iff X_H|S preserves exp(sigma)/xi(H) (d theta)^n",
     1e-6},
    {"sigma-transport", "sigma(Phi_t) = n t + sigma along the normalized flow", 1e-6},
    {"measure-obstruction", "equilibrium search verdict for the invariant measure", 1e-10},
};

const IdentitySpec kSandwich[] = {
    {"rectify-round-trip", "the restricted flow inverts the rectification", 1e-7},
    {"rectified-field", "D phi maps Z to the unit time direction", 1e-5},
    {"rectify-sigma-transport", "sigma(Phi_t) = r t + sigma along the rectifying flow", 1e-7},
    {"phi1-closed-form", "flow-built phi1 matches the closed form", 1e-6},
    {"phi1-pullback", "phi1*(dz + theta) = eta", 1e-5},
    {"phi1-reeb-speed", "D phi1 maps xi to d/dz", 1e-5},
    {"phi2-closed-form", "flow-built phi2 matches the closed form", 1e-6},
    {"phi2-pullback", "phi2*(exp(-s)(d eta_B - ds ^ eta_B)) = d theta", 1e-5},
    {"phi2-hamiltonian-speed", "D phi2 maps X_H|S to gamma d/ds", 1e-5},
    {"eta-b-closed-form", "the induced contact form on B matches the closed form", 1e-8},
    {"eta-b-contact", "eta_B ^ (d eta_B)^(n-1) stays nondegenerate on B (shortfall)", 0.0},
    {"composite-pullback", "the two-step map pulls dz + exp(-s) eta_B back to eta", 1e-5},
    {"sandwich-measure", "exp(sigma)/gamma (d theta)^n is invariant under the X_H|S flow", 1e-5},
};

const IdentitySpec kSampler[] = {
    {"kinetic-dilation", "Delta(K) = 2 K for the dilation field Delta = p d/dp", 1e-10},
    {"sigma-unit-rate", "Delta(ln(K)/2 + F(q)) = 1", 1e-10},
    {"dilation-pushforward", "K^(-n/2) rho(q) volume is invariant under the dilation flow",
     1e-8},
    {"energy-level-reeb",
     "on an energy level the Reeb field equals the symplectic dynamics over Delta(H)", 1e-6},
};

struct SuiteTable {
  const char* name;
  const IdentitySpec* specs;
  size_t count;
};

const SuiteTable kTables[] = {
    {"contact-identities", kContact, std::size(kContact)},
    {"zeroset", kZeroset, std::size(kZeroset)},
    {"measure", kMeasure, std::size(kMeasure)},
    {"sandwich", kSandwich, std::size(kSandwich)},
    {"sampler", kSampler, std::size(kSampler)},
};

const SuiteTable& table_for(const std::string& suite) {
  for (const auto& t : kTables)
    if (suite == t.name) return t;
  throw ConfigError("unknown suite '" + suite + "'");
}

const IdentitySpec& spec_for(const SuiteTable& table, const char* ref) {
  for (size_t i = 0; i < table.count; ++i)
    if (std::string(ref) == table.specs[i].ref) return table.specs[i];
  throw std::logic_error(std::string("identity not declared in checklist: ") + ref);
}

/// Accumulators created up front from the checklist so the emitted report
/// always carries the declared identities, in order.
class SuiteBuilder {
 public:
  SuiteBuilder(const std::string& suite, const RunConfig& cfg) : table_(table_for(suite)) {
    result_.name = suite;
    for (size_t i = 0; i < table_.count; ++i) {
      const IdentitySpec& s = table_.specs[i];
      double threshold = s.threshold;
      if (auto it = cfg.thresholds.find(s.ref); it != cfg.thresholds.end())
        threshold = it->second;
      accs_.emplace_back(s.ref, s.quote, threshold);
    }
  }

  IdentityAccumulator& acc(const char* ref) {
    for (size_t i = 0; i < table_.count; ++i)
      if (std::string(ref) == table_.specs[i].ref) return accs_[i];
    throw std::logic_error(std::string("identity not declared in checklist: ") + ref);
  }

  SuiteResult finish() {
    result_.identities.clear();
    result_.pass = true;
    for (auto& a : accs_) {
      result_.identities.push_back(a.finish());
      result_.pass = result_.pass && result_.identities.back().pass;
    }
    return result_;
  }

 private:
  const SuiteTable& table_;
  SuiteResult result_;
  std::vector<IdentityAccumulator> accs_;
};

template <typename F>
void for_samples(IdentityAccumulator& acc, int n, F&& eval) {
  for (int k = 0; k < n; ++k) {
    try {
      acc.add(eval(k));
    } catch (const DomainFailure&) {
      acc.domain_failure();
    }
  }
}

Box sample_box_for(const Chart& chart, double halfwidth = 1.0) {
  Box b = chart.box;
  Vector c = 0.5 * (b.lo + b.hi);
  for (int i = 0; i < b.dim(); ++i) {
    const double h = std::min(halfwidth, 0.45 * (b.hi[i] - b.lo[i]));
    b.lo[i] = c[i] - h;
    b.hi[i] = c[i] + h;
  }
  return b;
}

std::string format_point(const Vector& x) {
  std::string s = "(";
  char buf[32];
  for (int i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.3g", x[i]);
    s += buf;
    if (i + 1 < x.size()) s += ", ";
  }
  return s + ")";
}

ScalarField random_trig_field(SampleRng& rng, int dim) {
  Vector lin(dim), amp(dim), phase(dim), freq(dim);
  for (int i = 0; i < dim; ++i) {
    lin[i] = rng.uniform(-1.0, 1.0);
    amp[i] = rng.uniform(-1.0, 1.0);
    phase[i] = rng.uniform(0.0, 6.28);
    freq[i] = rng.uniform(-1.0, 1.0);
  }
  const double c0 = rng.uniform(-1.0, 1.0);
  const double cross = rng.uniform(-1.0, 1.0);
  const double cross_phase = rng.uniform(0.0, 6.28);
  ScalarField f;
  f.value = [=](const Vector& x) {
    double v = c0 + cross * std::sin(freq.dot(x) + cross_phase);
    for (int i = 0; i < x.size(); ++i) v += lin[i] * x[i] + amp[i] * std::sin(x[i] + phase[i]);
    return v;
  };
  f.gradient = [=](const Vector& x) {
    Vector g(x.size());
    const double dc = cross * std::cos(freq.dot(x) + cross_phase);
    for (int i = 0; i < x.size(); ++i)
      g[i] = lin[i] + amp[i] * std::cos(x[i] + phase[i]) + dc * freq[i];
    return g;
  };
  return f;
}

std::uint64_t mix_seed(std::uint64_t seed, const std::string& tag) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return seed ^ h;
}

DissipativeScenario build_dissipative(const RunConfig& cfg) {
  const double hw = cfg.scenario.box_halfwidth.value_or(20.0);
  try {
    return dissipative_scenario(cfg.scenario.gamma, cfg.scenario.potential, hw);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scenario precondition violated: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// contact-identities
// ---------------------------------------------------------------------------

SuiteResult run_contact_suite(const RunConfig& cfg) {
  SuiteBuilder sb("contact-identities", cfg);
  const DissipativeScenario sc = build_dissipative(cfg);
  const ContactSystem& sys = sc.system;
  const int n = sys.n;
  SampleRng rng(mix_seed(cfg.seed, "contact-identities"));
  const Box box = sample_box_for(sys.chart);
  const int N = cfg.samples;

  std::vector<Vector> pts;
  for (int k = 0; k < N; ++k) pts.push_back(rng.point_in(box));

  for_samples(sb.acc("reeb-defining"), N, [&](int k) {
    const ContactFrame fr = contact_frame(sys, pts[k]);
    const Vector xi = reeb(sys, pts[k]);
    const double norm_cond = std::abs(fr.eta.evaluate({xi}) - 1.0);
    const double kernel_cond = interior_product(xi, fr.deta).max_abs();
    return std::max(norm_cond, kernel_cond);
  });

  for_samples(sb.acc("reeb-darboux"), N, [&](int k) {
    Vector unit = Vector::Zero(sys.dim());
    unit[0] = 1.0;
    return (reeb(sys, pts[k]) - unit).cwiseAbs().maxCoeff();
  });

  for_samples(sb.acc("hamiltonian-dual-route"), N, [&](int k) {
    return (hamiltonian_field(sys, pts[k]) - darboux_hamiltonian_field(sys, pts[k]))
        .cwiseAbs()
        .maxCoeff();
  });

  for_samples(sb.acc("hamiltonian-defining"), N, [&](int k) {
    const Vector& x = pts[k];
    const ContactFrame fr = contact_frame(sys, x);
    const Vector xh = hamiltonian_field(sys, x);
    const Vector dh = sys.hamiltonian.grad(x);
    const double xih = reeb(sys, x).dot(dh);
    const KForm lhs = interior_product(xh, fr.deta) - KForm::covector(dh) + xih * fr.eta;
    const double pairing = std::abs(fr.eta.evaluate({xh}) + sys.hamiltonian.value(x));
    return std::max(lhs.max_abs(), pairing);
  });

  for_samples(sb.acc("energy-rate"), N, [&](int k) {
    const Vector& x = pts[k];
    const Vector xh = hamiltonian_field(sys, x);
    return std::abs(xh.dot(sys.hamiltonian.grad(x)) +
                    sys.hamiltonian.value(x) * xi_of_h(sys, x));
  });

  const VectorField xh_field = hamiltonian_vector_field(sys);
  for_samples(sb.acc("eta-transport"), N, [&](int k) {
    const Vector& x = pts[k];
    const KForm lie = lie_derivative(xh_field, sys.eta, x);
    return (lie + xi_of_h(sys, x) * sys.eta.value(x)).max_abs();
  });

  const FormField nu = liouville_volume_field(sys);
  for_samples(sb.acc("volume-transport"), N, [&](int k) {
    const Vector& x = pts[k];
    const KForm lie = lie_derivative(xh_field, nu, x);
    return (lie + ((n + 1) * xi_of_h(sys, x)) * nu.value(x)).max_abs();
  });

  const ContactSystem conf = conformal_system(sys);
  std::vector<Vector> pts_u;  // |H| bounded away from zero
  for (int k = 0; k < N; ++k) {
    Vector x = rng.point_in(box);
    for (int tries = 0; tries < 1000 && std::abs(sys.hamiltonian.value(x)) < 0.1; ++tries)
      x = rng.point_in(box);
    pts_u.push_back(x);
  }

  for_samples(sb.acc("conformal-reeb"), N, [&](int k) {
    return (reeb(conf, pts_u[k]) - hamiltonian_field(sys, pts_u[k])).cwiseAbs().maxCoeff();
  });

  for_samples(sb.acc("conformal-volume-ratio"), N, [&](int k) {
    const Vector& x = pts_u[k];
    const double h = sys.hamiltonian.value(x);
    const double expected = ((n + 1) % 2 == 0 ? 1.0 : -1.0) / std::pow(h, n + 1);
    const double ratio = check_contact(conf, x) / check_contact(sys, x);
    return std::abs(ratio - expected) / std::abs(expected);
  });

  for_samples(sb.acc("jacobi-structure"), N, [&](int k) {
    const Vector& x = pts[k];
    const ScalarField f = random_trig_field(rng, sys.dim());
    const ScalarField g = random_trig_field(rng, sys.dim());
    const ScalarField minus_one{[](const Vector&) { return -1.0; },
                                [d = sys.dim()](const Vector&) { return Vector::Zero(d).eval(); }};
    const double antisym =
        std::abs(jacobi_bracket(sys, f, g, x) + jacobi_bracket(sys, g, f, x));
    const double reeb_pairing =
        std::abs(jacobi_bracket(sys, f, minus_one, x) - reeb(sys, x).dot(f.grad(x)));
    // First-order rule {f g, H} = f {g, H} + g {f, H} - f g {1, H}.
    const ScalarField& H = sys.hamiltonian;
    ScalarField fg;
    fg.value = [f, g](const Vector& y) { return f.value(y) * g.value(y); };
    fg.gradient = [f, g](const Vector& y) {
      return Vector(f.value(y) * g.gradient(y) + g.value(y) * f.gradient(y));
    };
    ScalarField one{[](const Vector&) { return 1.0; },
                    [d = sys.dim()](const Vector&) { return Vector::Zero(d).eval(); }};
    const double rule = std::abs(
        jacobi_bracket(sys, fg, H, x) - f.value(x) * jacobi_bracket(sys, g, H, x) -
        g.value(x) * jacobi_bracket(sys, f, H, x) +
        f.value(x) * g.value(x) * jacobi_bracket(sys, one, H, x));
    return std::max({antisym, reeb_pairing, rule});
  });

  // Conservative limit: same potential, no gamma z term.
  ContactSystem cons = sys;
  {
    const Potential V = sc.potential;
    cons.hamiltonian.value = [V, n](const Vector& x) {
      Vector q(n), p(n);
      for (int i = 0; i < n; ++i) {
        q[i] = x[q_axis(i)];
        p[i] = x[p_axis(i)];
      }
      return 0.5 * p.squaredNorm() + V.value(q);
    };
    cons.hamiltonian.gradient = [V, n](const Vector& x) {
      Vector q(n);
      for (int i = 0; i < n; ++i) q[i] = x[q_axis(i)];
      const Vector vq = V.gradient(q);
      Vector g = Vector::Zero(2 * n + 1);
      for (int i = 0; i < n; ++i) {
        g[q_axis(i)] = vq[i];
        g[p_axis(i)] = x[p_axis(i)];
      }
      return g;
    };
  }
  const VectorField cons_field = hamiltonian_vector_field(cons);
  const FormField cons_nu = liouville_volume_field(cons);
  for_samples(sb.acc("conservative-limit"), N, [&](int k) {
    const Vector& x = pts[k];
    const Vector xh = hamiltonian_field(cons, x);
    const double rate = std::abs(xh.dot(cons.hamiltonian.grad(x)));
    const double vol = lie_derivative(cons_field, cons_nu, x).max_abs();
    return std::max(rate, vol);
  });

  return sb.finish();
}

// ---------------------------------------------------------------------------
// zeroset
// ---------------------------------------------------------------------------

SuiteResult run_zeroset_suite(const RunConfig& cfg) {
  SuiteBuilder sb("zeroset", cfg);
  const DissipativeScenario sc = build_dissipative(cfg);
  LevelSetChart lsc = sc.level_set();
  SampleRng rng(mix_seed(cfg.seed, "zeroset"));
  const Box box = sample_box_for(lsc.surface());
  const int N = cfg.samples;
  const int n = lsc.dof();

  std::vector<Vector> pts;
  for (int k = 0; k < N; ++k) pts.push_back(rng.point_in(box));

  for_samples(sb.acc("surface-solve"), N, [&](int k) {
    return std::abs(sc.system.hamiltonian.value(lsc.include(pts[k])));
  });

  {
    auto& acc = sb.acc("omega-nondegenerate");
    double min_det = std::numeric_limits<double>::infinity();
    for (int k = 0; k < N; ++k) {
      const InducedStructure ind = induced(lsc, pts[k]);
      min_det = std::min(min_det, std::abs(ind.omega_det));
      acc.add(std::max(0.0, 0.1 - std::abs(ind.omega_det)));
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "min |det omega| = %.6g", min_det);
    acc.set_note(buf);
  }

  for_samples(sb.acc("liouville-defining"), N,
              [&](int k) { return induced(lsc, pts[k]).liouville_residual; });

  for_samples(sb.acc("tangency"), N, [&](int k) {
    const Vector x = lsc.include(pts[k]);
    const Vector xh = hamiltonian_field(sc.system, x);
    return std::abs(xh[0] - lsc.height_gradient(pts[k]).dot(xh.tail(xh.size() - 1)));
  });

  for_samples(sb.acc("liouville-reparam"), N, [&](int k) {
    const InducedStructure ind = induced(lsc, pts[k]);
    const Vector xr = restricted_field(lsc, pts[k]);
    return (xr + lsc.xi_h(pts[k]) * ind.liouville).cwiseAbs().maxCoeff();
  });

  {
    const FormField theta = induced_theta_field(lsc);
    const FormField omega = derivative_field(theta, {1e-5, false});
    const VectorField delta = liouville_vector_field(lsc);
    for_samples(sb.acc("liouville-expansion"), N, [&](int k) {
      const KForm lie = lie_derivative(delta, omega, pts[k], {1e-3, false});
      return (lie - omega.value(pts[k])).max_abs();
    });
  }

  if (sc.sigma) {
    for_samples(sb.acc("sigma-residual"), N,
                [&](int k) { return std::abs(sigma_residual_s(lsc, *sc.sigma, pts[k])); });
    for_samples(sb.acc("sigma-residual-delta-form"), N, [&](int k) {
      const Vector& u = pts[k];
      const InducedStructure ind = induced(lsc, u);
      const double direct = sigma_residual_s(lsc, *sc.sigma, u);
      const double delta_form =
          -lsc.xi_h(u) * (ind.liouville.dot(sc.sigma->grad(u)) + n);
      return std::abs(direct - delta_form);
    });
  } else {
    sb.acc("sigma-residual").skip_all("no transport solution sigma for this potential");
    sb.acc("sigma-residual-delta-form").skip_all("no transport solution sigma for this potential");
    for (int k = 0; k < N; ++k) {
      sb.acc("sigma-residual").skip_sample();
      sb.acc("sigma-residual-delta-form").skip_sample();
    }
  }

  {
    auto& acc = sb.acc("equilibrium-obstruction");
    const Box search = Box::cube(2 * n, 2.0);
    const auto roots = find_equilibria(lsc, search, 3);
    if (roots.empty()) {
      acc.add(0.0);
      acc.set_note("no equilibrium found on the search box (not a proof of absence)");
    } else {
      for (const auto& r : roots)
        acc.add(restricted_field(lsc, r).cwiseAbs().maxCoeff());
      acc.set_note("obstruction: equilibrium at " + format_point(roots.front()) +
                   "; no invariant measure can exist on S");
    }
  }

  return sb.finish();
}

// ---------------------------------------------------------------------------
// measure
// ---------------------------------------------------------------------------

SuiteResult run_measure_suite(const RunConfig& cfg) {
  SuiteBuilder sb("measure", cfg);
  const DissipativeScenario sc = build_dissipative(cfg);
  LevelSetChart lsc = sc.level_set();
  SampleRng rng(mix_seed(cfg.seed, "measure"));
  const ContactSystem& sys = sc.system;
  const int n = sys.n;
  const int N = cfg.samples;
  const FlowOptions opts_c = cfg.integrator.with_box(sys.chart.box);
  const FlowOptions opts_s = cfg.integrator.with_box(lsc.surface().box);

  // Obstruction first: with an equilibrium on S the surface measures are
  // not constructible and their checks are reported as skipped.
  std::vector<Vector> equilibria = find_equilibria(lsc, Box::cube(2 * n, 2.0), 3);
  {
    auto& acc = sb.acc("measure-obstruction");
    if (equilibria.empty()) {
      acc.add(0.0);
      acc.set_note("no equilibrium found on the search box (not a proof of existence)");
    } else {
      for (const auto& r : equilibria)
        acc.add(restricted_field(lsc, r).cwiseAbs().maxCoeff());
      acc.set_note("obstruction: equilibrium at " + format_point(equilibria.front()) +
                   "; no invariant measure can exist on S");
    }
  }

  // Conformal volume on U = {H != 0}; orbits of X_H never cross H = 0.
  {
    const FormField nu = liouville_volume_field(sys);
    const ScalarField& H = sys.hamiltonian;
    auto rho = [nu, H, n](const Vector& x) {
      return std::pow(std::abs(H.value(x)), -(n + 1)) * std::abs(top_coefficient(nu.value(x)));
    };
    const Box box = sample_box_for(sys.chart);
    for_samples(sb.acc("conformal-measure"), N, [&](int k) {
      Vector x = rng.point_in(box);
      for (int tries = 0; tries < 1000 && std::abs(H.value(x)) < 0.3; ++tries)
        x = rng.point_in(box);
      const double t = (k % 2 == 0) ? 1.0 : -1.0;
      const PushforwardResult r = pushforward_invariance_check(rho, sc.x_h, x, t, opts_c);
      if (r.status != FlowStatus::complete) throw DomainFailure(to_string(r.status));
      return std::abs(r.residual);
    });
  }

  const Box sbox = sample_box_for(lsc.surface());
  const double times[] = {-2.0, -1.0, 1.0, 2.0};

  if (sc.sigma && equilibria.empty()) {
    const ScalarField sigma = *sc.sigma;
    auto rho_s = [&lsc, sigma](const Vector& u) { return measure_density_s(lsc, sigma, u); };

    for_samples(sb.acc("surface-measure-closed-flow"), N, [&](int k) {
      const Vector u = rng.point_in(sbox);
      const double t = times[k % 4];
      const Vector ut = sc.surface_flow(t, u);
      const double det = sc.surface_flow_jacobian(t, u).determinant();
      return std::abs(rho_s(ut) * std::abs(det) / rho_s(u) - 1.0);
    });

    for_samples(sb.acc("surface-measure-rk45"), N, [&](int k) {
      const Vector u = rng.point_in(sbox);
      const double t = times[k % 4];
      const PushforwardResult r =
          pushforward_invariance_check(rho_s, sc.x_h_restricted, u, t, opts_s);
      if (r.status != FlowStatus::complete) throw DomainFailure(to_string(r.status));
      return std::abs(r.residual);
    });

    {
      // The equivalence pairs the Liouville flow with density
      // exp(sigma)(d theta)^n against the restricted flow with density
      // exp(sigma)/xi(H) (d theta)^n; their residuals must vanish together.
      VectorField delta;
      const double gamma = sc.gamma;
      const VectorField xr = sc.x_h_restricted;
      delta.value = [xr, gamma](const Vector& u) { return Vector(-xr.value(u) / gamma); };
      delta.jacobian = [xr, gamma](const Vector& u) { return Matrix(-xr.jacobian(u) / gamma); };
      auto rho_delta = [&lsc, sigma](const Vector& u) {
        return std::exp(sigma.value(u)) *
               std::abs(top_coefficient(wedge_power(induced(lsc, u).omega, lsc.dof())));
      };
      auto& acc = sb.acc("measure-equivalence");
      const double tol = spec_for(table_for("measure"), "measure-equivalence").threshold;
      bool together = true;
      for_samples(acc, N, [&](int k) {
        const Vector u = rng.point_in(sbox);
        const double t = (k % 2 == 0) ? 1.0 : -1.0;
        const PushforwardResult ra = pushforward_invariance_check(rho_delta, delta, u, t, opts_s);
        const PushforwardResult rb =
            pushforward_invariance_check(rho_s, sc.x_h_restricted, u, t, opts_s);
        if (ra.status != FlowStatus::complete || rb.status != FlowStatus::complete)
          throw DomainFailure("equivalence flows incomplete");
        together = together && ((std::abs(ra.residual) <= tol) == (std::abs(rb.residual) <= tol));
        return std::max(std::abs(ra.residual), std::abs(rb.residual));
      });
      if (!together) acc.force_fail("the paired residuals did not vanish together");
    }

    {
      VectorField zfield;
      const double gamma = sc.gamma;
      const VectorField xr = sc.x_h_restricted;
      zfield.value = [xr, gamma](const Vector& u) { return Vector(xr.value(u) / gamma); };
      for_samples(sb.acc("sigma-transport"), N, [&](int k) {
        const Vector u = rng.point_in(sbox);
        const double t = times[k % 4];
        FlowOptions o = opts_s;
        o.record_samples = false;
        const FlowOutcome flow = integrate(zfield, u, t, o);
        if (!flow.complete()) throw DomainFailure(to_string(flow.status));
        return std::abs(sigma.value(flow.final_point()) - (n * t + sigma.value(u)));
      });
    }
  } else {
    const std::string why = !sc.sigma
                                ? "no transport solution sigma for this potential"
                                : "equilibrium obstruction: surface measure not constructible";
    for (const char* ref : {"surface-measure-closed-flow", "surface-measure-rk45",
                            "measure-equivalence", "sigma-transport"}) {
      sb.acc(ref).skip_all(why);
      for (int k = 0; k < N; ++k) sb.acc(ref).skip_sample();
    }
  }

  return sb.finish();
}

// ---------------------------------------------------------------------------
// sandwich
// ---------------------------------------------------------------------------

SuiteResult run_sandwich_suite(const RunConfig& cfg) {
  SuiteBuilder sb("sandwich", cfg);
  const DissipativeScenario sc = build_dissipative(cfg);
  LevelSetChart lsc = sc.level_set();
  const int N = cfg.samples;
  SampleRng rng(mix_seed(cfg.seed, "sandwich"));

  const std::vector<const char*> all_refs = {
      "rectify-round-trip", "phi1-closed-form",  "phi1-pullback",
      "phi1-reeb-speed",    "phi2-closed-form",  "phi2-pullback",
      "phi2-hamiltonian-speed", "eta-b-closed-form", "eta-b-contact",
      "composite-pullback", "sandwich-measure",  "rectified-field",
      "rectify-sigma-transport"};

  // Obstruction / missing sigma: the whole construction is skipped.
  const auto equilibria = find_equilibria(lsc, Box::cube(2 * lsc.dof(), 2.0), 3);
  if (!sc.sigma || !equilibria.empty()) {
    const std::string why =
        !sc.sigma ? "no transport solution sigma for this potential; construction skipped"
                  : "obstruction: equilibrium at " + format_point(equilibria.front()) +
                        "; construction skipped";
    for (const char* ref : all_refs) {
      sb.acc(ref).skip_all(why);
      for (int k = 0; k < N; ++k) sb.acc(ref).skip_sample();
    }
    return sb.finish();
  }

  SandwichMaps maps(lsc, *sc.sigma);
  if (!maps.constant_xi_ok() || !maps.sigma_ok()) {
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "preconditions failed (constant xi(H): %s, sigma residual max %.3g); untestable",
                  maps.constant_xi_ok() ? "ok" : "violated", maps.max_sigma_residual());
    for (const char* ref : all_refs) {
      sb.acc(ref).skip_all(buf);
      for (int k = 0; k < N; ++k) sb.acc(ref).skip_sample();
    }
    return sb.finish();
  }

  const Box cbox = sample_box_for(lsc.system().chart);
  const Box sbox = sample_box_for(lsc.surface());
  const Box bbox = sample_box_for(maps.slice_chart());
  std::vector<Vector> ys, us, bs;
  for (int k = 0; k < N; ++k) {
    ys.push_back(rng.point_in(cbox));
    us.push_back(rng.point_in(sbox));
    bs.push_back(rng.point_in(bbox));
  }

  for_samples(sb.acc("rectify-round-trip"), N,
              [&](int k) { return maps.roundtrip_residual_phi2(us[k]); });
  for_samples(sb.acc("rectified-field"), N,
              [&](int k) { return maps.rectified_field_residual(us[k]); });
  for_samples(sb.acc("rectify-sigma-transport"), N, [&](int k) {
    return maps.sigma_transport_residual(us[k], rng.uniform(-1.0, 1.0));
  });

  for_samples(sb.acc("phi1-closed-form"), N, [&](int k) {
    const RectifyOutcome o = maps.phi1(ys[k]);
    if (!o.ok()) throw DomainFailure(o.detail);
    const auto [z, u] = sc.phi1_closed(ys[k]);
    const Vector expected = insert_coordinate(u, 0, ys[k][0] - z);
    return std::max(std::abs(o.t - z), (o.point - expected).cwiseAbs().maxCoeff());
  });
  for_samples(sb.acc("phi1-pullback"), N,
              [&](int k) { return maps.phi1_pullback_residual(ys[k]); });
  for_samples(sb.acc("phi1-reeb-speed"), N,
              [&](int k) { return maps.phi1_speed_residual(ys[k]); });

  for_samples(sb.acc("phi2-closed-form"), N, [&](int k) {
    const RectifyOutcome o = maps.phi2(us[k]);
    if (!o.ok()) throw DomainFailure(o.detail);
    const auto [s, on_b] = sc.phi2_closed(us[k]);
    return std::max(std::abs(o.t - s), (o.point - on_b).cwiseAbs().maxCoeff());
  });
  for_samples(sb.acc("phi2-pullback"), N,
              [&](int k) { return maps.phi2_pullback_residual(us[k]); });
  for_samples(sb.acc("phi2-hamiltonian-speed"), N,
              [&](int k) { return maps.phi2_speed_residual(us[k]); });

  if (maps.eliminated_axis() == 0) {
    for_samples(sb.acc("eta-b-closed-form"), N, [&](int k) {
      return (maps.eta_b(bs[k]).coefficients() - sc.eta_b_closed(bs[k]).coefficients())
          .cwiseAbs()
          .maxCoeff();
    });
  } else {
    sb.acc("eta-b-closed-form")
        .skip_all("slice chart eliminates a different coordinate than the closed form");
    for (int k = 0; k < N; ++k) sb.acc("eta-b-closed-form").skip_sample();
  }

  {
    auto& acc = sb.acc("eta-b-contact");
    double min_val = std::numeric_limits<double>::infinity();
    for_samples(acc, N, [&](int k) {
      const double v = std::abs(maps.eta_b_contact_value(bs[k]));
      min_val = std::min(min_val, v);
      return std::max(0.0, 1e-6 - v);
    });
    char buf[64];
    std::snprintf(buf, sizeof buf, "min |eta_B ^ d eta_B| = %.6g", min_val);
    acc.set_note(buf);
  }

  for_samples(sb.acc("composite-pullback"), N,
              [&](int k) { return maps.composite_pullback_residual(ys[k]); });

  {
    const ScalarField sigma = *sc.sigma;
    auto rho_s = [&lsc, sigma](const Vector& u) { return measure_density_s(lsc, sigma, u); };
    const FlowOptions opts_s = cfg.integrator.with_box(lsc.surface().box);
    for_samples(sb.acc("sandwich-measure"), N, [&](int k) {
      const double t = (k % 2 == 0) ? 1.0 : -1.0;
      const PushforwardResult r =
          pushforward_invariance_check(rho_s, sc.x_h_restricted, us[k], t, opts_s);
      if (r.status != FlowStatus::complete) throw DomainFailure(to_string(r.status));
      return std::abs(r.residual);
    });
  }

  return sb.finish();
}

// ---------------------------------------------------------------------------
// sampler
// ---------------------------------------------------------------------------

SuiteResult run_sampler_suite(const RunConfig& cfg) {
  SuiteBuilder sb("sampler", cfg);
  SampleRng rng(mix_seed(cfg.seed, "sampler"));
  const int N = cfg.samples;

  // Both metrics are exercised regardless of the configured one.
  const std::vector<std::string> metrics = {"identity", "diagonal"};
  std::vector<SamplerScenario> scs;
  for (const auto& m : metrics) scs.push_back(cotangent_sampler(m, cfg.scenario.dof));

  auto sample_off_tube = [&](const SamplerScenario& sc) {
    const Box box = sample_box_for(sc.chart);
    Vector x = rng.point_in(box);
    for (int tries = 0; tries < 1000; ++tries) {
      Vector p(sc.dof);
      for (int i = 0; i < sc.dof; ++i) p[i] = x[sp_axis(i)];
      if (p.norm() >= 0.1) break;
      x = rng.point_in(box);
    }
    return x;
  };

  for_samples(sb.acc("kinetic-dilation"), N, [&](int k) {
    const SamplerScenario& sc = scs[k % 2];
    const Vector x = sample_off_tube(sc);
    const double dk = sc.dilation.value(x).dot(sc.kinetic.grad(x));
    const double kk = sc.kinetic.value(x);
    return std::abs(dk - 2.0 * kk) / std::max(1.0, std::abs(2.0 * kk));
  });

  for_samples(sb.acc("sigma-unit-rate"), N, [&](int k) {
    const SamplerScenario& sc = scs[k % 2];
    const Vector x = sample_off_tube(sc);
    return std::abs(sc.dilation.value(x).dot(sc.sigma.grad(x)) - 1.0);
  });

  for_samples(sb.acc("dilation-pushforward"), N, [&](int k) {
    const SamplerScenario& sc = scs[k % 2];
    const Vector x = sample_off_tube(sc);
    const double t = rng.uniform(-1.0, 1.0);
    FlowOptions opts;
    opts.rtol = opts.atol = 1e-12;
    opts.escape_box = sc.chart.box.inflated(4.0);  // dilation moves p by e^{|t|}
    const PushforwardResult r = pushforward_invariance_check(sc.density, sc.dilation, x, t, opts);
    if (r.status != FlowStatus::complete) throw DomainFailure(to_string(r.status));
    return std::abs(r.residual);
  });

  {
    const EnergyLevelDemo demo = energy_level_demo();
    const Box box = sample_box_for(demo.system.chart);
    for_samples(sb.acc("energy-level-reeb"), N, [&](int k) {
      (void)k;
      const Vector x = rng.point_in(box);
      return (reeb(demo.system, x) - demo.expected_reeb.value(x)).cwiseAbs().maxCoeff();
    });
  }

  return sb.finish();
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"contact-identities", "zeroset", "measure",
                                                 "sandwich", "sampler"};
  return names;
}

bool suite_known(const std::string& suite) {
  for (const auto& s : suite_names())
    if (s == suite) return true;
  return false;
}

std::vector<std::string> suite_checklist(const std::string& suite) {
  const SuiteTable& t = table_for(suite);
  std::vector<std::string> refs;
  for (size_t i = 0; i < t.count; ++i) refs.push_back(t.specs[i].ref);
  return refs;
}

SuiteResult run_suite(const std::string& suite, const RunConfig& cfg) {
  if (!suite_known(suite)) throw ConfigError("unknown suite '" + suite + "'");
  const bool needs_dissipative = suite != "sampler";
  if (needs_dissipative && cfg.scenario.name != "dissipative")
    throw ConfigError("suite '" + suite + "' requires the dissipative scenario, got '" +
                      cfg.scenario.name + "'");
  if (suite == "sampler" && cfg.scenario.name != "cotangent-sampler" &&
      cfg.scenario.name != "dissipative")
    throw ConfigError("suite 'sampler' requires the cotangent-sampler scenario");

  if (suite == "contact-identities") return run_contact_suite(cfg);
  if (suite == "zeroset") return run_zeroset_suite(cfg);
  if (suite == "measure") return run_measure_suite(cfg);
  if (suite == "sandwich") return run_sandwich_suite(cfg);
  return run_sampler_suite(cfg);
}

RunReport run_report(const RunConfig& cfg) {
  if (cfg.scenario.name != "dissipative" && cfg.scenario.name != "cotangent-sampler")
    throw ConfigError("unknown scenario '" + cfg.scenario.name + "'");
  if (cfg.suites.empty()) throw ConfigError("config: no suites selected");
  RunReport report;
  char buf[128];
  if (cfg.scenario.name == "dissipative")
    std::snprintf(buf, sizeof buf, "dissipative(gamma=%g, potential=%s)", cfg.scenario.gamma,
                  cfg.scenario.potential.c_str());
  else
    std::snprintf(buf, sizeof buf, "cotangent-sampler(metric=%s, dof=%d)",
                  cfg.scenario.metric.c_str(), cfg.scenario.dof);
  report.scenario = buf;
  report.seed = cfg.seed;
  for (const auto& suite : cfg.suites) {
    report.suites.push_back(run_suite(suite, cfg));
    report.pass = report.pass && report.suites.back().pass;
  }
  return report;
}

}  // namespace contactflow
