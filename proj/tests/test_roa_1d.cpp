#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "roakit/extract.hpp"
#include "roakit/inner.hpp"
#include "roakit/outer.hpp"

// Single-integrator oracle: dx/dt = u, u in [-1,1], X = (-1,1),
// X_T = (-0.1,0.1). Every state can be driven to the target with u =
// -sign(x), so the true region of attraction is all of X and the reaching
// value from x is e^{-beta(|x|-0.1)}: an analytic yardstick for the whole
// chain.

using namespace roakit;

namespace {

ControlSystem oracle_system(double beta = 1.0) {
  const int n = 1;
  std::vector<Polynomial> f = {Polynomial(n)};
  std::vector<std::vector<Polynomial>> G = {{Polynomial::constant(n, 1.0)}};
  auto X = SemialgebraicSet::from_strings({"1 - x1^2 >= 0"}, n);
  auto XT = SemialgebraicSet::from_strings({"0.01 - x1^2 >= 0"}, n);
  InputBox box;
  box.lo = Eigen::VectorXd::Constant(1, -1.0);
  box.hi = Eigen::VectorXd::Constant(1, 1.0);
  return make_system(std::move(f), std::move(G), std::move(X), std::move(XT), box, beta);
}

Eigen::VectorXd pt(double x) { return Eigen::VectorXd::Constant(1, x); }

}  // namespace

TEST_CASE("internal input box mapping") {
  auto sys = oracle_system();
  CHECK(sys.sets.u_max == doctest::Approx(2.0));
  // Drift absorbed the lower bound: internal dynamics -1 + u_int.
  CHECK(sys.f[0] == Polynomial::constant(1, -1.0));
  CHECK(sys.u_offset(0) == doctest::Approx(-1.0));
  CHECK(sys.u_scale(0) == doctest::Approx(1.0));
}

TEST_CASE("outer assembly bookkeeping") {
  auto sys = oracle_system();
  auto asmb = assemble_outer(sys, 2);
  CHECK(asmb.d == 4);
  CHECK(asmb.mu.size() == basis_size(1, 4));
  // Test functions capped so every transport term stays within the budget;
  // constant columns leave the full budget available.
  CHECK(asmb.v_degree == 4);
  CHECK(asmb.test_monomials.size() == 5);
  CHECK(asmb.box_rows.size() == 1);
  CHECK(asmb.box_rows[0].size() == basis_size(1, 4));
  // No inputs: the same system without channels loses the box rows.
  auto sys0 = sys;
  sys0.m = 0;
  sys0.G.assign(1, {});
  sys0.sets.m = 0;
  sys0.sets.u_max = 0.0;
  auto asmb0 = assemble_outer(sys0, 2);
  CHECK(asmb0.box_rows.empty());
  CHECK(asmb0.sigma.empty());
}

TEST_CASE("outer solve: certificate feasibility, value-function bound, duality") {
  auto sys = oracle_system();
  SolveOptions opts;
  opts.tol = 1e-8;
  opts.max_iter = 200000;
  auto res = solve_outer(sys, 3, opts, 99);
  CHECK(res.report.status == SolveStatus::Optimal);
  CHECK(res.feasibility.pass);

  // Feasible v dominates the reaching value e^{-beta(|x|-0.1)} > 0 on X, so
  // the zero superlevel set covers the whole oracle ROA.
  for (double x = -0.99; x <= 0.99; x += 0.01) {
    const double V = std::exp(-sys.beta * std::max(0.0, std::abs(x) - 0.1));
    CHECK(res.certificate.v.evaluate(&x, 1) > 0.0);
    CHECK(res.certificate.v.evaluate(&x, 1) >= V - 2e-4);
  }

  CHECK(outer_membership(res, pt(0.0)) == Membership::Inside);
  CHECK(outer_membership(res, pt(0.95)) == Membership::Inside);
  CHECK_THROWS_AS(outer_membership(res, pt(1.5)), OutOfDomain);

  // Strong duality at the SDP level: primal mass objective against the
  // integral of v.
  const double scale = 1.0 + std::abs(res.report.objective_primal) +
                       std::abs(res.report.objective_dual);
  CHECK(std::abs(res.report.objective_primal - res.report.objective_dual) <= 10.0 * opts.tol * scale);
  const MomentVector leb = lebesgue_moments(sys.sets.X, res.certificate.v.degree());
  // objective == mass(muT1) - mass(muT2) matches the dual integral of v.
  CHECK(res.objective == doctest::Approx(leb.integrate(res.certificate.v)).epsilon(1e-4));
}

TEST_CASE("explicit SOS route agrees with the multiplier decode") {
  auto sys = oracle_system();
  SolveOptions opts;
  opts.tol = 1e-8;
  opts.max_iter = 200000;
  auto res = solve_outer(sys, 3, opts, 7);
  SolverReport rep;
  auto cert = solve_outer_sos(sys, 3, opts, &rep);
  CHECK(rep.status == SolveStatus::Optimal);
  auto chk = check_outer_certificate(cert, sys, 4000, 11);
  CHECK(chk.pass);
  // Same optimal value from both routes.
  const MomentVector leb = lebesgue_moments(sys.sets.X, std::max(cert.v.degree(), res.certificate.v.degree()));
  CHECK(leb.integrate(cert.v) == doctest::Approx(leb.integrate(res.certificate.v)).epsilon(2e-3));
}

TEST_CASE("controller extraction and projection on the oracle") {
  auto sys = oracle_system();
  SolveOptions opts;
  opts.tol = 1e-8;
  opts.max_iter = 400000;
  auto res = solve_outer(sys, 4, opts, 5);
  auto raw = extract_raw(res, 4);
  REQUIRE(raw.components.size() == 1);
  CHECK(raw.provenance == Provenance::Raw);

  const MomentVector nu = lebesgue_moments(sys.sets.X, 2 * res.k);
  auto proj = project_controller(raw, nu, sys.sets, -1, 0.0, opts);
  CHECK(proj.provenance == Provenance::Projected);

  // Projected controller honors the internal box on samples.
  for (const auto& x : sample_set(sys.sets.X, 2000, 3)) {
    const double u = proj.components[0].evaluate(x.data(), 1);
    CHECK(u >= -1e-6 * (1.0 + sys.sets.u_max));
    CHECK(u <= sys.sets.u_max + 1e-6 * (1.0 + sys.sets.u_max));
  }

  // Residual monotonicity: projection trades fidelity for feasibility.
  const auto raw_res = moment_residuals(res, raw);
  const auto proj_res = moment_residuals(res, proj);
  CHECK(raw_res[0] <= proj_res[0] + 1e-9);

  CHECK_THROWS_AS(closed_loop(sys, raw), std::invalid_argument);

  // User-facing controller maps back into [-1, 1].
  auto uu = user_controller(sys, proj);
  for (const auto& x : sample_set(sys.sets.X, 500, 8)) {
    const double u = uu[0].evaluate(x.data(), 1);
    CHECK(u >= -1.0 - 1e-5);
    CHECK(u <= 1.0 + 1e-5);
  }
}

TEST_CASE("inner solve on the oracle closed loop") {
  auto sys = oracle_system();
  SolveOptions opts;
  opts.tol = 1e-8;
  opts.max_iter = 600000;
  auto res = solve_outer(sys, 4, opts, 5);
  auto raw = extract_raw(res, 4);
  const MomentVector nu = lebesgue_moments(sys.sets.X, 2 * res.k);
  auto proj = project_controller(raw, nu, sys.sets, -1, 0.0, opts);
  auto fbar = closed_loop(sys, proj);

  const std::vector<double> betas = {10.0, 1.0, 0.1, 0.01, 0.001};
  auto inner = solve_inner(fbar, sys.sets, betas, 4, opts, 21);
  CHECK(inner.report.status == SolveStatus::Optimal);
  CHECK(inner.feasibility.pass);
  REQUIRE(inner.certificate.v.size() == betas.size());

  // Soundness: every grid point the certificate admits really reaches the
  // target under the closed loop, and sits inside the outer set.
  long inner_pts = 0;
  for (double x = -0.995; x <= 0.9951; x += 0.005) {
    if (inner_membership(inner, pt(x)) != Membership::Inside) continue;
    ++inner_pts;
    CHECK(outer_membership(res, pt(x)) == Membership::Inside);
    auto tr = simulate(fbar, pt(x), 1e-2, 200.0, sys.sets);
    CHECK(tr.event == ExitEvent::ReachedTarget);
  }
  CHECK(inner_pts > 40);

  // Boundary of X stays outside (the certificate is nonnegative there).
  CHECK(inner_membership(inner, pt(1.0)) == Membership::Outside);

  // Objective bounded by the complement volume plus solver slack.
  const double vol_XTc = 2.0 - 0.2;
  CHECK(inner.objective <= vol_XTc + 1e-4);

  // Single-discount wiring: deterministic solve, bitwise-equal objective.
  auto single_a = solve_inner(fbar, sys.sets, {1.0}, 3, opts, 21);
  auto single_b = solve_inner(fbar, sys.sets, {1.0}, 3, opts, 21);
  CHECK(single_a.objective == single_b.objective);

  // Invariance spot check.
  auto inv = check_invariance(inner, fbar, sys.sets, 50, 1e-2, 200.0, 31);
  CHECK(!inv.empty_inner);
  CHECK(inv.pre_exit_violations == 0);
  CHECK(inv.reached_target == inv.trajectories);

  // Gronwall decay along closed-loop paths for both certificates; the
  // per-discount decay applies while outside the target.
  const auto comp = complement_pieces(sys.sets.X, sys.sets.X_T);
  for (const auto& x0 : sample_set(sys.sets.X, 20, 17)) {
    auto tr = simulate(fbar, x0, 1e-2, 200.0, sys.sets);
    CHECK(gronwall_violations(res.certificate.v, res.beta, tr, 1e-4) == 0);
    for (std::size_t i = 0; i < betas.size(); ++i) {
      CHECK(gronwall_violations(inner.certificate.v[i], betas[i], tr, 1e-4, &comp[0]) == 0);
    }
  }

  // Duplicate discounts are rejected.
  CHECK_THROWS_AS(assemble_inner(fbar, sys.sets, {1.0, 1.0}, 3), std::invalid_argument);
}
