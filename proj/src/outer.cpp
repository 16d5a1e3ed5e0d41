#include "roakit/outer.hpp"

#include <cmath>
#include <sstream>

namespace roakit {

namespace {

// Largest test degree keeping every transport integrand within the moment
// budget d: the drift raises a degree-a test by deg(f) - 1 and each input
// column by deg(G) - 1.
int liouville_degree_cap(const ControlSystem& sys, int d) {
  int cap = d;
  cap = std::min(cap, d + 1 - sys.deg_f());
  if (sys.m > 0) cap = std::min(cap, d + 1 - sys.deg_G());
  return cap;
}

SolverReport make_report(const ConicSolution& sol) {
  return SolverReport{sol.status, sol.residuals, sol.iterations, sol.objective_primal,
                      sol.objective_dual};
}

}  // namespace

OuterAssembly assemble_outer(const ControlSystem& sys, int k) {
  const int n = sys.n, m = sys.m;
  const int d = 2 * k;
  const int maxdeg = std::max({sys.deg_f(), sys.deg_G(), sys.sets.X.max_degree(),
                               sys.sets.X_T.max_degree()});
  if (d < maxdeg) {
    throw std::invalid_argument("assemble_outer: order too small for the problem degrees");
  }
  const int cap = liouville_degree_cap(sys, d);
  if (cap < 0) throw std::invalid_argument("assemble_outer: degree shortfall for test functions");

  OuterAssembly out;
  out.n = n;
  out.m = m;
  out.k = k;
  out.d = d;
  out.v_degree = cap;
  const int L = static_cast<int>(basis_size(n, d));

  ProgramBuilder bld;
  auto y_mu = bld.add_free(L);
  auto y_T1 = bld.add_free(L);
  auto y_T2 = bld.add_free(L);
  std::vector<std::vector<VarRef>> y_sig(static_cast<std::size_t>(m)),
      y_sig_hat(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    y_sig[static_cast<std::size_t>(i)] = bld.add_free(L);
    y_sig_hat[static_cast<std::size_t>(i)] = bld.add_free(L);
  }

  compile_measure_block(bld, y_mu, sys.sets.X, d);
  compile_measure_block(bld, y_T1, sys.sets.X_T, d);
  compile_measure_block(bld, y_T2, sys.sets.X, d);
  for (int i = 0; i < m; ++i) {
    compile_measure_block(bld, y_sig[static_cast<std::size_t>(i)], sys.sets.X, d);
    compile_measure_block(bld, y_sig_hat[static_cast<std::size_t>(i)], sys.sets.X, d);
  }

  out.leb_X = lebesgue_moments(sys.sets.X, d);
  out.test_monomials = monomial_basis(n, cap);
  for (const auto& alpha : out.test_monomials) {
    LinExpr expr;
    expr += LinExpr(y_mu[rank_of(alpha)], sys.beta);
    expr += LinExpr(y_T1[rank_of(alpha)], 1.0);
    expr += LinExpr(y_T2[rank_of(alpha)], 1.0);
    const Polynomial mono = Polynomial::monomial(alpha, 1.0);
    const Polynomial drift_flow = lie_derivative(mono, sys.f);
    for (const auto& [idx, c] : drift_flow.terms()) {
      expr -= LinExpr(y_mu[rank_of(idx)], c);
    }
    for (int i = 0; i < m; ++i) {
      const Polynomial gain_flow = lie_derivative(mono, sys.G_column(i));
      for (const auto& [idx, c] : gain_flow.terms()) {
        expr -= LinExpr(y_sig[static_cast<std::size_t>(i)][rank_of(idx)], c);
      }
    }
    out.liouville_rows.push_back(bld.add_row(expr, out.leb_X.at(alpha)));
  }

  const auto full_basis = monomial_basis(n, d);
  out.box_rows.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (std::size_t r = 0; r < full_basis.size(); ++r) {
      LinExpr expr;
      expr += LinExpr(y_sig[static_cast<std::size_t>(i)][r], 1.0);
      expr += LinExpr(y_sig_hat[static_cast<std::size_t>(i)][r], 1.0);
      expr -= LinExpr(y_mu[r], sys.sets.u_max);
      out.box_rows[static_cast<std::size_t>(i)].push_back(bld.add_row(expr, 0.0));
    }
  }

  bld.add_objective(y_T1[0], -1.0);
  bld.add_objective(y_T2[0], 1.0);

  out.prog = bld.build();
  const auto flatten = [&](const std::vector<VarRef>& vars) {
    std::vector<int> flat;
    flat.reserve(vars.size());
    for (auto v : vars) flat.push_back(bld.flat_index(v));
    return flat;
  };
  out.mu = flatten(y_mu);
  out.muT1 = flatten(y_T1);
  out.muT2 = flatten(y_T2);
  for (int i = 0; i < m; ++i) {
    out.sigma.push_back(flatten(y_sig[static_cast<std::size_t>(i)]));
    out.sigma_hat.push_back(flatten(y_sig_hat[static_cast<std::size_t>(i)]));
  }
  return out;
}

CertificateCheck check_outer_certificate(const OuterCertificate& cert, const ControlSystem& sys,
                                         int samples, std::uint64_t seed) {
  const auto xs = sample_set(sys.sets.X, samples, seed);
  const auto xts = sample_set(sys.sets.X_T, samples, seed + 1);
  const int n = sys.n;

  Polynomial flow = cert.beta * Polynomial(cert.v) - lie_derivative(cert.v, sys.f);
  for (int i = 0; i < sys.m; ++i) flow -= sys.sets.u_max * cert.p[static_cast<std::size_t>(i)];
  std::vector<Polynomial> gains;
  for (int i = 0; i < sys.m; ++i) {
    gains.push_back(cert.p[static_cast<std::size_t>(i)] -
                    lie_derivative(cert.v, sys.G_column(i)));
  }

  CertificateCheck chk;
  const auto eval_on = [&](const Polynomial& p, const std::vector<Eigen::VectorXd>& pts) {
    std::vector<double> vals;
    vals.reserve(pts.size());
    for (const auto& x : pts) vals.push_back(p.evaluate(x.data(), n));
    return vals;
  };
  chk.checks.push_back(check_nonneg("flow: beta*v - Lf(v) - ubar*sum(p) >= 0 on X",
                                    eval_on(flow, xs), chk.tolerance));
  for (int i = 0; i < sys.m; ++i) {
    chk.checks.push_back(check_nonneg("gain p" + std::to_string(i + 1) + " >= LG(v) on X",
                                      eval_on(gains[static_cast<std::size_t>(i)], xs),
                                      chk.tolerance));
    chk.checks.push_back(check_nonneg("p" + std::to_string(i + 1) + " >= 0 on X",
                                      eval_on(cert.p[static_cast<std::size_t>(i)], xs),
                                      chk.tolerance));
  }
  chk.checks.push_back(check_nonneg("v >= 1 on X_T",
                                    eval_on(cert.v - Polynomial::constant(n, 1.0), xts),
                                    chk.tolerance));
  chk.checks.push_back(check_nonneg("v >= -1 on X",
                                    eval_on(cert.v + Polynomial::constant(n, 1.0), xs),
                                    chk.tolerance));
  chk.pass = true;
  for (const auto& c : chk.checks) chk.pass = chk.pass && c.pass;
  return chk;
}

OuterCertificate solve_outer_sos(const ControlSystem& sys, int k, const SolveOptions& opts,
                                 SolverReport* report) {
  const int n = sys.n, m = sys.m;
  const int d = 2 * k;
  const int cap = liouville_degree_cap(sys, d);
  ProgramBuilder bld;
  std::vector<VarRef> vvars;
  AffinePoly v = AffinePoly::unknown(n, cap, bld, &vvars);
  std::vector<AffinePoly> p;
  std::vector<std::vector<VarRef>> pvars(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    p.push_back(AffinePoly::unknown(n, d, bld, &pvars[static_cast<std::size_t>(i)]));
  }

  AffinePoly flow = v * sys.beta - v.lie(sys.f);
  for (int i = 0; i < m; ++i) flow -= p[static_cast<std::size_t>(i)] * sys.sets.u_max;
  compile_sos_constraint(bld, flow, pieces_for(sys.sets.X), d);
  for (int i = 0; i < m; ++i) {
    compile_sos_constraint(bld, p[static_cast<std::size_t>(i)] - v.lie(sys.G_column(i)),
                           pieces_for(sys.sets.X), d);
    compile_sos_constraint(bld, p[static_cast<std::size_t>(i)], pieces_for(sys.sets.X), d);
  }
  compile_sos_constraint(bld, v - AffinePoly::from(Polynomial::constant(n, 1.0)),
                         pieces_for(sys.sets.X_T), d);
  compile_sos_constraint(bld, v + AffinePoly::from(Polynomial::constant(n, 1.0)),
                         pieces_for(sys.sets.X), d);

  const MomentVector leb = lebesgue_moments(sys.sets.X, cap);
  const auto vbasis = monomial_basis(n, cap);
  for (std::size_t i = 0; i < vbasis.size(); ++i) {
    bld.add_objective(vvars[i], leb.at(vbasis[i]));
  }

  auto prog = bld.build();
  auto sol = solve(prog, opts);
  if (report) *report = make_report(sol);
  if (sol.status != SolveStatus::Optimal) {
    throw SolverFailure("outer SOS solve did not reach optimality: " + to_string(sol.status),
                        sol.status, sol.residuals);
  }
  OuterCertificate cert;
  cert.beta = sys.beta;
  cert.k = k;
  cert.v = Polynomial(n);
  for (std::size_t i = 0; i < vbasis.size(); ++i) {
    cert.v.add_term(vbasis[i], sol.x(bld.flat_index(vvars[i])));
  }
  const auto pbasis = monomial_basis(n, d);
  for (int i = 0; i < m; ++i) {
    Polynomial pi(n);
    for (std::size_t r = 0; r < pbasis.size(); ++r) {
      pi.add_term(pbasis[r], sol.x(bld.flat_index(pvars[static_cast<std::size_t>(i)][r])));
    }
    cert.p.push_back(std::move(pi));
  }
  return cert;
}

OuterResult solve_outer(const ControlSystem& sys, int k, const SolveOptions& opts,
                        std::uint64_t check_seed, int check_samples) {
  OuterAssembly asmb = assemble_outer(sys, k);
  ConicSolution sol = solve(asmb.prog, opts);
  if (sol.status != SolveStatus::Optimal) {
    throw SolverFailure("outer relaxation solve failed: " + to_string(sol.status), sol.status,
                        sol.residuals);
  }

  OuterResult res;
  res.k = k;
  res.beta = sys.beta;
  res.sets = sys.sets;
  res.report = make_report(sol);

  const int n = sys.n, d = asmb.d;
  const auto read_moments = [&](const std::vector<int>& idx) {
    MomentVector y(n, d);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      y.values(static_cast<Eigen::Index>(i)) = sol.x(idx[i]);
    }
    return y;
  };
  res.mu = read_moments(asmb.mu);
  res.muT1 = read_moments(asmb.muT1);
  res.muT2 = read_moments(asmb.muT2);
  for (int i = 0; i < sys.m; ++i) {
    res.sigma.push_back(read_moments(asmb.sigma[static_cast<std::size_t>(i)]));
    res.sigma_hat.push_back(read_moments(asmb.sigma_hat[static_cast<std::size_t>(i)]));
  }
  res.objective = res.muT1.mass() - res.muT2.mass();

  // Certificate = negated equality multipliers, one coefficient per test row.
  res.certificate.beta = sys.beta;
  res.certificate.k = k;
  res.certificate.v = Polynomial(n);
  for (std::size_t t = 0; t < asmb.test_monomials.size(); ++t) {
    res.certificate.v.add_term(asmb.test_monomials[t], -sol.y(asmb.liouville_rows[t]));
  }
  const auto full_basis = monomial_basis(n, d);
  for (int i = 0; i < sys.m; ++i) {
    Polynomial pi(n);
    for (std::size_t r = 0; r < full_basis.size(); ++r) {
      pi.add_term(full_basis[r], -sol.y(asmb.box_rows[static_cast<std::size_t>(i)][r]));
    }
    res.certificate.p.push_back(std::move(pi));
  }

  res.feasibility = check_outer_certificate(res.certificate, sys, check_samples, check_seed);
  if (!res.feasibility.pass) {
    // Multipliers from a first-order solve can be slightly infeasible; the
    // explicit SOS form enforces the inequalities structurally.
    res.certificate = solve_outer_sos(sys, k, opts, nullptr);
    res.certificate_resolved = true;
    res.feasibility = check_outer_certificate(res.certificate, sys, check_samples, check_seed);
    if (!res.feasibility.pass) {
      const auto* w = res.feasibility.worst_check();
      std::ostringstream os;
      os << "outer certificate rejected after SOS re-solve; worst violation "
         << (w ? w->worst : 0.0) << " in '" << (w ? w->name : "?") << "'";
      throw CertificateRejected(os.str(), w ? w->worst : 0.0);
    }
  }
  return res;
}

Membership outer_membership(const OuterResult& res, const Eigen::VectorXd& x) {
  if (!res.sets.X.contains(x, 1e-12)) {
    throw OutOfDomain("outer_membership: point outside closure(X)");
  }
  return res.certificate.v.evaluate(x.data(), static_cast<int>(x.size())) > 0.0
             ? Membership::Inside
             : Membership::Outside;
}

}  // namespace roakit
