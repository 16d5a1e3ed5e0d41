#include "roakit/inner.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "roakit/rng.hpp"

namespace roakit {

namespace {

int field_degree(const std::vector<Polynomial>& fbar) {
  int d = 0;
  for (const auto& p : fbar) d = std::max(d, p.degree());
  return d;
}

void validate_betas(const std::vector<double>& beta_vec) {
  if (beta_vec.empty()) throw std::invalid_argument("inner: empty discount vector");
  std::set<double> seen;
  for (double b : beta_vec) {
    if (b <= 0.0) throw std::invalid_argument("inner: discounts must be positive");
    if (!seen.insert(b).second) throw std::invalid_argument("inner: duplicate discount value");
  }
}

MomentVector complement_lebesgue(const ProblemSets& sets, int d) {
  MomentVector lx = lebesgue_moments(sets.X, d);
  MomentVector lt = lebesgue_moments(sets.X_T, d);
  MomentVector out(lx.n, d);
  out.values = lx.values - lt.values;
  return out;
}

SolverReport make_report(const ConicSolution& sol) {
  return SolverReport{sol.status, sol.residuals, sol.iterations, sol.objective_primal,
                      sol.objective_dual};
}

}  // namespace

InnerAssembly assemble_inner(const std::vector<Polynomial>& fbar, const ProblemSets& sets,
                             const std::vector<double>& beta_vec, int k) {
  validate_betas(beta_vec);
  const int n = static_cast<int>(fbar.size());
  const int d = 2 * k;
  const int deg_f = field_degree(fbar);
  if (d < std::max({deg_f, sets.X.max_degree(), sets.X_T.max_degree()})) {
    throw std::invalid_argument("assemble_inner: order too small for the problem degrees");
  }
  const int cap = std::min(d, d + 1 - deg_f);
  if (cap < 0) throw std::invalid_argument("assemble_inner: degree shortfall for test functions");

  const auto comp_pieces = complement_pieces(sets.X, sets.X_T);
  const auto bdry_pieces = boundary_pieces(sets.X);
  const int n_beta = static_cast<int>(beta_vec.size());
  const int L = static_cast<int>(basis_size(n, d));

  InnerAssembly out;
  out.n = n;
  out.k = k;
  out.d = d;
  out.n_beta = n_beta;
  out.v_degree = cap;

  ProgramBuilder bld;
  std::vector<std::vector<VarRef>> y0, y0h;
  for (const auto& piece : comp_pieces) {
    y0.push_back(bld.add_free(L));
    y0h.push_back(bld.add_free(L));
    compile_measure_block(bld, y0.back(), piece, d);
    compile_measure_block(bld, y0h.back(), piece, d);
  }
  std::vector<std::vector<std::vector<VarRef>>> yo(static_cast<std::size_t>(n_beta)),
      ye(static_cast<std::size_t>(n_beta));
  for (int i = 0; i < n_beta; ++i) {
    for (const auto& piece : comp_pieces) {
      yo[static_cast<std::size_t>(i)].push_back(bld.add_free(L));
      compile_measure_block(bld, yo[static_cast<std::size_t>(i)].back(), piece, d);
    }
    for (const auto& piece : bdry_pieces) {
      ye[static_cast<std::size_t>(i)].push_back(bld.add_free(L));
      compile_measure_block(bld, ye[static_cast<std::size_t>(i)].back(), piece, d);
    }
  }

  out.test_monomials = monomial_basis(n, cap);
  out.liouville_rows.resize(static_cast<std::size_t>(n_beta));
  for (int i = 0; i < n_beta; ++i) {
    for (const auto& alpha : out.test_monomials) {
      LinExpr expr;
      const std::size_t ra = rank_of(alpha);
      for (const auto& yT : ye[static_cast<std::size_t>(i)]) expr += LinExpr(yT[ra], 1.0);
      const Polynomial mono = Polynomial::monomial(alpha, 1.0);
      const Polynomial flow = lie_derivative(mono, fbar);
      for (const auto& ymu : yo[static_cast<std::size_t>(i)]) {
        expr += LinExpr(ymu[ra], beta_vec[static_cast<std::size_t>(i)]);
        for (const auto& [idx, c] : flow.terms()) expr -= LinExpr(ymu[rank_of(idx)], c);
      }
      for (const auto& yini : y0) expr -= LinExpr(yini[ra], 1.0);
      out.liouville_rows[static_cast<std::size_t>(i)].push_back(bld.add_row(expr, 0.0));
    }
  }

  out.leb_XTc = complement_lebesgue(sets, d);
  const auto full_basis = monomial_basis(n, d);
  for (std::size_t r = 0; r < full_basis.size(); ++r) {
    LinExpr expr;
    for (const auto& yini : y0) expr += LinExpr(yini[r], 1.0);
    for (const auto& yslack : y0h) expr += LinExpr(yslack[r], 1.0);
    out.domination_rows.push_back(bld.add_row(expr, out.leb_XTc.values(static_cast<Eigen::Index>(r))));
  }

  for (const auto& yini : y0) bld.add_objective(yini[0], -1.0);

  out.prog = bld.build();
  const auto flatten = [&](const std::vector<VarRef>& vars) {
    std::vector<int> flat;
    flat.reserve(vars.size());
    for (auto v : vars) flat.push_back(bld.flat_index(v));
    return flat;
  };
  for (const auto& v : y0) out.mu0.push_back(flatten(v));
  for (const auto& v : y0h) out.mu0_hat.push_back(flatten(v));
  out.mu.resize(static_cast<std::size_t>(n_beta));
  out.muT.resize(static_cast<std::size_t>(n_beta));
  for (int i = 0; i < n_beta; ++i) {
    for (const auto& v : yo[static_cast<std::size_t>(i)]) out.mu[static_cast<std::size_t>(i)].push_back(flatten(v));
    for (const auto& v : ye[static_cast<std::size_t>(i)]) out.muT[static_cast<std::size_t>(i)].push_back(flatten(v));
  }
  return out;
}

CertificateCheck check_inner_certificate(const InnerCertificate& cert,
                                         const std::vector<Polynomial>& fbar,
                                         const ProblemSets& sets, int samples, std::uint64_t seed) {
  const int n = static_cast<int>(fbar.size());
  const auto comp_pieces = complement_pieces(sets.X, sets.X_T);
  const auto bdry_pieces = boundary_pieces(sets.X);
  const int n_beta = static_cast<int>(cert.beta_vec.size());

  Polynomial vsum(n);
  for (const auto& vi : cert.v) vsum += vi;

  CertificateCheck chk;
  const auto eval_on = [&](const Polynomial& p, const std::vector<Eigen::VectorXd>& pts) {
    std::vector<double> vals;
    vals.reserve(pts.size());
    for (const auto& x : pts) vals.push_back(p.evaluate(x.data(), n));
    return vals;
  };

  for (std::size_t pc = 0; pc < comp_pieces.size(); ++pc) {
    const auto pts = sample_set(comp_pieces[pc], samples, seed + pc);
    const std::string where = " on complement piece " + std::to_string(pc + 1);
    for (int i = 0; i < n_beta; ++i) {
      const Polynomial decay =
          cert.v[static_cast<std::size_t>(i)] * cert.beta_vec[static_cast<std::size_t>(i)] -
          lie_derivative(cert.v[static_cast<std::size_t>(i)], fbar);
      chk.checks.push_back(check_nonneg("decay of v" + std::to_string(i + 1) + where,
                                        eval_on(decay, pts), chk.tolerance));
    }
    chk.checks.push_back(check_nonneg("w >= 1 + sum(v)" + where,
                                      eval_on(cert.w - vsum - Polynomial::constant(n, 1.0), pts),
                                      chk.tolerance));
    chk.checks.push_back(check_nonneg("w >= 0" + where, eval_on(cert.w, pts), chk.tolerance));
  }
  for (std::size_t pb = 0; pb < bdry_pieces.size(); ++pb) {
    const auto pts = sample_set(bdry_pieces[pb], samples, seed + 100 + pb);
    for (int i = 0; i < n_beta; ++i) {
      chk.checks.push_back(check_nonneg(
          "v" + std::to_string(i + 1) + " >= 0 on boundary piece " + std::to_string(pb + 1),
          eval_on(cert.v[static_cast<std::size_t>(i)], pts), chk.tolerance));
    }
  }
  chk.pass = true;
  for (const auto& c : chk.checks) chk.pass = chk.pass && c.pass;
  return chk;
}

InnerCertificate solve_inner_sos(const std::vector<Polynomial>& fbar, const ProblemSets& sets,
                                 const std::vector<double>& beta_vec, int k,
                                 const SolveOptions& opts, SolverReport* report) {
  validate_betas(beta_vec);
  const int n = static_cast<int>(fbar.size());
  const int d = 2 * k;
  const int cap = std::min(d, d + 1 - field_degree(fbar));
  const auto comp_pieces = complement_pieces(sets.X, sets.X_T);
  const auto bdry_pieces = boundary_pieces(sets.X);
  const int n_beta = static_cast<int>(beta_vec.size());

  ProgramBuilder bld;
  std::vector<VarRef> wvars;
  AffinePoly w = AffinePoly::unknown(n, d, bld, &wvars);
  std::vector<AffinePoly> v;
  std::vector<std::vector<VarRef>> vvars(static_cast<std::size_t>(n_beta));
  for (int i = 0; i < n_beta; ++i) {
    v.push_back(AffinePoly::unknown(n, cap, bld, &vvars[static_cast<std::size_t>(i)]));
  }
  AffinePoly vsum(n);
  for (const auto& vi : v) vsum += vi;

  for (const auto& piece : comp_pieces) {
    for (int i = 0; i < n_beta; ++i) {
      compile_sos_constraint(
          bld, v[static_cast<std::size_t>(i)] * beta_vec[static_cast<std::size_t>(i)] -
                   v[static_cast<std::size_t>(i)].lie(fbar),
          pieces_for(piece), d);
    }
    compile_sos_constraint(bld, w - vsum - AffinePoly::from(Polynomial::constant(n, 1.0)),
                           pieces_for(piece), d);
    compile_sos_constraint(bld, w, pieces_for(piece), d);
  }
  for (const auto& piece : bdry_pieces) {
    for (int i = 0; i < n_beta; ++i) {
      compile_sos_constraint(bld, v[static_cast<std::size_t>(i)], pieces_for(piece), d);
    }
  }

  const MomentVector leb = complement_lebesgue(sets, d);
  const auto wbasis = monomial_basis(n, d);
  for (std::size_t i = 0; i < wbasis.size(); ++i) {
    bld.add_objective(wvars[i], leb.at(wbasis[i]));
  }

  auto prog = bld.build();
  auto sol = solve(prog, opts);
  if (report) *report = make_report(sol);
  if (sol.status != SolveStatus::Optimal) {
    throw SolverFailure("inner SOS solve did not reach optimality: " + to_string(sol.status),
                        sol.status, sol.residuals);
  }
  InnerCertificate cert;
  cert.beta_vec = beta_vec;
  cert.k = k;
  cert.w = Polynomial(n);
  for (std::size_t i = 0; i < wbasis.size(); ++i) {
    cert.w.add_term(wbasis[i], sol.x(bld.flat_index(wvars[i])));
  }
  const auto vbasis = monomial_basis(n, cap);
  for (int i = 0; i < n_beta; ++i) {
    Polynomial vi(n);
    for (std::size_t r = 0; r < vbasis.size(); ++r) {
      vi.add_term(vbasis[r], sol.x(bld.flat_index(vvars[static_cast<std::size_t>(i)][r])));
    }
    cert.v.push_back(std::move(vi));
  }
  return cert;
}

InnerResult solve_inner(const std::vector<Polynomial>& fbar, const ProblemSets& sets,
                        const std::vector<double>& beta_vec, int k, const SolveOptions& opts,
                        std::uint64_t check_seed, int check_samples) {
  InnerAssembly asmb = assemble_inner(fbar, sets, beta_vec, k);
  ConicSolution sol = solve(asmb.prog, opts);
  if (sol.status != SolveStatus::Optimal) {
    throw SolverFailure("inner relaxation solve failed: " + to_string(sol.status), sol.status,
                        sol.residuals);
  }

  InnerResult res;
  res.k = k;
  res.beta_vec = beta_vec;
  res.sets = sets;
  res.fbar = fbar;
  res.report = make_report(sol);

  const int n = asmb.n, d = asmb.d;
  const auto sum_moments = [&](const std::vector<std::vector<int>>& groups) {
    MomentVector y(n, d);
    for (const auto& idx : groups) {
      for (std::size_t i = 0; i < idx.size(); ++i) {
        y.values(static_cast<Eigen::Index>(i)) += sol.x(idx[i]);
      }
    }
    return y;
  };
  res.mu0 = sum_moments(asmb.mu0);
  res.mu0_hat = sum_moments(asmb.mu0_hat);
  for (int i = 0; i < asmb.n_beta; ++i) {
    res.mu.push_back(sum_moments(asmb.mu[static_cast<std::size_t>(i)]));
    res.muT.push_back(sum_moments(asmb.muT[static_cast<std::size_t>(i)]));
  }
  res.objective = res.mu0.mass();

  res.certificate.beta_vec = beta_vec;
  res.certificate.k = k;
  const auto full_basis = monomial_basis(n, d);
  res.certificate.w = Polynomial(n);
  for (std::size_t r = 0; r < full_basis.size(); ++r) {
    res.certificate.w.add_term(full_basis[r], -sol.y(asmb.domination_rows[r]));
  }
  for (int i = 0; i < asmb.n_beta; ++i) {
    Polynomial vi(n);
    for (std::size_t t = 0; t < asmb.test_monomials.size(); ++t) {
      vi.add_term(asmb.test_monomials[t],
                  -sol.y(asmb.liouville_rows[static_cast<std::size_t>(i)][t]));
    }
    res.certificate.v.push_back(std::move(vi));
  }

  res.feasibility = check_inner_certificate(res.certificate, fbar, sets, check_samples, check_seed);
  if (!res.feasibility.pass) {
    res.certificate = solve_inner_sos(fbar, sets, beta_vec, k, opts, nullptr);
    res.certificate_resolved = true;
    res.feasibility =
        check_inner_certificate(res.certificate, fbar, sets, check_samples, check_seed);
    if (!res.feasibility.pass) {
      const auto* w = res.feasibility.worst_check();
      std::ostringstream os;
      os << "inner certificate rejected after SOS re-solve; worst violation "
         << (w ? w->worst : 0.0) << " in '" << (w ? w->name : "?") << "'";
      throw CertificateRejected(os.str(), w ? w->worst : 0.0);
    }
  }
  return res;
}

Membership inner_membership(const InnerResult& res, const Eigen::VectorXd& x) {
  if (!res.sets.X.contains(x, 1e-12)) {
    throw OutOfDomain("inner_membership: point outside closure(X)");
  }
  double s = 0.0;
  for (const auto& vi : res.certificate.v) s += vi.evaluate(x.data(), static_cast<int>(x.size()));
  return s < 0.0 ? Membership::Inside : Membership::Outside;
}

InvarianceReport check_invariance(const InnerResult& res, const std::vector<Polynomial>& fbar,
                                  const ProblemSets& sets, int samples, double dt, double T,
                                  std::uint64_t seed) {
  const int n = static_cast<int>(fbar.size());
  InvarianceReport rep;
  Polynomial vsum(n);
  for (const auto& vi : res.certificate.v) vsum += vi;
  const auto inside = [&](const Eigen::VectorXd& x) {
    return sets.X.contains(x, 1e-12) && vsum.evaluate(x.data(), n) < 0.0;
  };

  // Premise of positive invariance: the whole closed target inside the set.
  rep.target_contained = true;
  for (const auto& piece : boundary_pieces(sets.X_T)) {
    try {
      for (const auto& x : sample_set(piece, 200, seed + 9)) {
        if (vsum.evaluate(x.data(), n) >= 0.0) rep.target_contained = false;
      }
    } catch (const EmptyOrThin&) {
      rep.target_contained = false;
    }
  }

  // Inner-set sampling by rejection over the bounding box of X.
  std::vector<Eigen::VectorXd> pts;
  {
    Rng rng(seed);
    const auto& box = *sets.X.box;
    Eigen::VectorXd x(n);
    long proposals = 0;
    const long cap = 10'000'000;
    while (static_cast<int>(pts.size()) < samples && proposals < cap) {
      ++proposals;
      for (int j = 0; j < n; ++j) x(j) = rng.uniform(box.lo(j), box.hi(j));
      if (inside(x)) pts.push_back(x);
    }
    if (pts.empty()) {
      rep.empty_inner = true;
      return rep;
    }
  }

  rep.min_margin = -std::numeric_limits<double>::infinity();
  ProblemSets free_sets = sets;  // no-target variant for full-horizon runs
  free_sets.X_T.inequalities = {Polynomial::constant(n, -1.0)};
  free_sets.X_T.equalities.clear();

  for (const auto& x0 : pts) {
    ++rep.trajectories;
    Trajectory tr = simulate(fbar, x0, dt, T, sets);
    if (tr.event == ExitEvent::ReachedTarget) ++rep.reached_target;
    bool exited = tr.event == ExitEvent::LeftX;
    // Grid states up to the target hit; the interpolated hit state stands in
    // for the final grid point, which already lies past tau.
    const std::size_t last = tr.event == ExitEvent::ReachedTarget && tr.states.size() > 1
                                 ? tr.states.size() - 1
                                 : tr.states.size();
    for (std::size_t s = 0; s < last && !exited; ++s) {
      const double val = vsum.evaluate(tr.states[s].data(), n);
      rep.min_margin = std::max(rep.min_margin, val);
      if (val >= 0.0) exited = true;
    }
    if (!exited && tr.event == ExitEvent::ReachedTarget) {
      const double val = vsum.evaluate(tr.event_state.data(), n);
      rep.min_margin = std::max(rep.min_margin, val);
      if (val >= 0.0) exited = true;
    }
    if (exited) ++rep.pre_exit_violations;

    if (rep.target_contained) {
      Trajectory full = simulate(fbar, x0, dt, T, free_sets);
      bool full_exit = full.event == ExitEvent::LeftX;
      for (std::size_t s = 0; s < full.states.size() && !full_exit; ++s) {
        if (vsum.evaluate(full.states[s].data(), n) >= 0.0) full_exit = true;
      }
      if (full_exit) ++rep.full_horizon_exits;
    }
  }
  return rep;
}

}  // namespace roakit
