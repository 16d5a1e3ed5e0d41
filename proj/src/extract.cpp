#include "roakit/extract.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace roakit {

std::string to_string(Provenance p) { return p == Provenance::Raw ? "Raw" : "Projected"; }

namespace {

Eigen::MatrixXd left_block(const MomentVector& y, int k, int deg_u) {
  const Eigen::MatrixXd M = moment_matrix(y, k);
  const auto cols = static_cast<Eigen::Index>(basis_size(y.n, deg_u));
  return M.leftCols(cols);
}

Eigen::VectorXd first_moments(const MomentVector& y, int deg) {
  return y.values.head(static_cast<Eigen::Index>(basis_size(y.n, deg)));
}

Polynomial from_coeffs(int n, int deg, const Eigen::VectorXd& c) {
  Polynomial p(n);
  const auto basis = monomial_basis(n, deg);
  for (std::size_t i = 0; i < basis.size(); ++i) p.add_term(basis[i], c(static_cast<Eigen::Index>(i)));
  return p;
}

Eigen::VectorXd coeff_vector(const Polynomial& p, int deg) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis_size(p.dim(), deg)));
  for (const auto& [a, v] : p.terms()) c(static_cast<Eigen::Index>(rank_of(a))) = v;
  return c;
}

}  // namespace

Controller extract_raw(const OuterResult& res, int deg_u) {
  const int k = res.k;
  if (deg_u > k) throw std::invalid_argument("extract_raw: deg_u must not exceed the order k");
  const int n = res.mu.n;
  Controller u;
  u.degree = deg_u;
  u.provenance = Provenance::Raw;
  u.k = k;
  u.u_max = res.sets.u_max;

  const Eigen::MatrixXd M = left_block(res.mu, k, deg_u);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  if (smax <= 1e-14 * std::max(1.0, std::abs(res.mu.mass()))) {
    throw DegenerateMoments("extract_raw: occupation moment matrix is numerically zero");
  }
  svd.setThreshold(1e-9);  // relative to the largest singular value

  for (std::size_t i = 0; i < res.sigma.size(); ++i) {
    const Eigen::VectorXd sig = first_moments(res.sigma[i], k);
    const Eigen::VectorXd coeffs = svd.solve(sig);
    u.components.push_back(from_coeffs(n, deg_u, coeffs));
    u.moment_residuals.push_back((M * coeffs - sig).norm());
  }
  return u;
}

Controller project_controller(const Controller& raw, const MomentVector& nu,
                              const ProblemSets& sets, int deg_s, double l1_gamma,
                              const SolveOptions& opts) {
  const int n = nu.n;
  const int deg_u = raw.degree;
  const double u_max = raw.u_max;
  if (nu.d < 2 * deg_u) throw std::invalid_argument("project_controller: nu degree shortfall");

  // Degree budget: the smallest even budget covering the controller, widened
  // so every multiplier g gets a nontrivial companion of degree >= deg_s.
  int max_g = sets.X.max_degree();
  int budget = 2 * ((deg_u + 1) / 2);
  budget = std::max(budget, max_g + (max_g % 2));
  if (deg_s >= 0) budget = std::max(budget, max_g + deg_s);

  const auto ubasis = monomial_basis(n, deg_u);
  const auto Ldu = static_cast<Eigen::Index>(ubasis.size());
  const Eigen::MatrixXd M1 = left_block(nu, deg_u, deg_u);
  // Square root for the epigraph block (eigen clamp guards round-off).
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M1);
  const Eigen::MatrixXd R =
      eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();

  Controller out;
  out.degree = deg_u;
  out.provenance = Provenance::Projected;
  out.k = raw.k;
  out.u_max = u_max;
  out.nu_description = raw.nu_description;

  for (std::size_t ch = 0; ch < raw.components.size(); ++ch) {
    const int deg_raw = raw.components[ch].degree();
    if (nu.d < deg_u + deg_raw) {
      throw std::invalid_argument("project_controller: nu degree shortfall for the raw target");
    }
    const Eigen::VectorXd uhat = coeff_vector(raw.components[ch], deg_raw);
    const auto Lhat = static_cast<Eigen::Index>(basis_size(n, deg_raw));
    Eigen::MatrixXd M2(Ldu, Lhat);
    const auto hbasis = monomial_basis(n, deg_raw);
    for (Eigen::Index r = 0; r < Ldu; ++r) {
      for (Eigen::Index c = 0; c < Lhat; ++c) {
        M2(r, c) = nu.at(ubasis[static_cast<std::size_t>(r)].plus(hbasis[static_cast<std::size_t>(c)]));
      }
    }
    const Eigen::VectorXd lin = M2 * uhat;

    ProgramBuilder bld;
    std::vector<VarRef> uvars;
    AffinePoly u_poly = AffinePoly::unknown(n, deg_u, bld, &uvars);
    VarRef t = bld.add_free();

    // Epigraph: t >= ||R u||^2 via [[t, (Ru)'],[Ru, I]] psd.
    PsdBlock schur = bld.add_psd_block(static_cast<int>(Ldu) + 1);
    bld.add_row(bld.psd_entry(schur, 0, 0) - LinExpr(t), 0.0);
    for (Eigen::Index r = 0; r < Ldu; ++r) {
      LinExpr e = bld.psd_entry(schur, static_cast<int>(r) + 1, 0);
      for (Eigen::Index c = 0; c < Ldu; ++c) {
        if (R(r, c) != 0.0) e -= LinExpr(uvars[static_cast<std::size_t>(c)], R(r, c));
      }
      bld.add_row(e, 0.0);
    }
    for (Eigen::Index r = 0; r < Ldu; ++r) {
      for (Eigen::Index c = r; c < Ldu; ++c) {
        bld.add_row(bld.psd_entry(schur, static_cast<int>(r) + 1, static_cast<int>(c) + 1),
                    r == c ? 1.0 : 0.0);
      }
    }

    compile_sos_constraint(bld, u_poly, pieces_for(sets.X), budget);
    compile_sos_constraint(bld, AffinePoly::from(Polynomial::constant(n, u_max)) - u_poly,
                           pieces_for(sets.X), budget);

    bld.add_objective(t, 1.0);
    for (Eigen::Index r = 0; r < Ldu; ++r) {
      bld.add_objective(uvars[static_cast<std::size_t>(r)], -2.0 * lin(r));
    }
    if (l1_gamma > 0.0) {
      for (Eigen::Index r = 0; r < Ldu; ++r) {
        VarRef bound = bld.add_free();
        VarRef sp = bld.add_nonneg(), sm = bld.add_nonneg();
        bld.add_row(LinExpr(bound) - LinExpr(uvars[static_cast<std::size_t>(r)]) - LinExpr(sp), 0.0);
        bld.add_row(LinExpr(bound) + LinExpr(uvars[static_cast<std::size_t>(r)]) - LinExpr(sm), 0.0);
        bld.add_objective(bound, l1_gamma);
      }
    }

    auto prog = bld.build();
    auto sol = solve(prog, opts);
    if (sol.status == SolveStatus::Infeasible) {
      // u = u_max/2 with zero multipliers is always feasible for u_max >= 0.
      throw ProjectionInfeasible("project_controller: solver reported an infeasible projection");
    }
    if (sol.status != SolveStatus::Optimal) {
      throw SolverFailure("project_controller: solve failed: " + to_string(sol.status),
                          sol.status, sol.residuals);
    }
    Eigen::VectorXd coeffs(Ldu);
    for (Eigen::Index r = 0; r < Ldu; ++r) coeffs(r) = sol.x(bld.flat_index(uvars[static_cast<std::size_t>(r)]));
    out.components.push_back(from_coeffs(n, deg_u, coeffs));
  }
  return out;
}

std::vector<Polynomial> closed_loop(const ControlSystem& sys, const Controller& u,
                                    bool force_raw) {
  if (u.provenance == Provenance::Raw && !force_raw) {
    throw std::invalid_argument(
        "closed_loop: raw controller has unverified input bounds (pass force_raw to override)");
  }
  if (static_cast<int>(u.components.size()) != sys.m) {
    throw DimensionMismatch("closed_loop: channel count mismatch");
  }
  std::vector<Polynomial> fbar = sys.f;
  for (int r = 0; r < sys.n; ++r) {
    for (int i = 0; i < sys.m; ++i) {
      fbar[static_cast<std::size_t>(r)] +=
          sys.G[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] *
          u.components[static_cast<std::size_t>(i)];
    }
  }
  return fbar;
}

std::vector<Polynomial> user_controller(const ControlSystem& sys, const Controller& u) {
  std::vector<Polynomial> out;
  for (int i = 0; i < sys.m; ++i) {
    Polynomial ui = u.components[static_cast<std::size_t>(i)] * sys.u_scale(i);
    ui += Polynomial::constant(sys.n, sys.u_offset(i));
    out.push_back(std::move(ui));
  }
  return out;
}

std::vector<double> moment_residuals(const OuterResult& res, const Controller& u) {
  const Eigen::MatrixXd M = left_block(res.mu, res.k, u.degree);
  std::vector<double> out;
  for (std::size_t i = 0; i < u.components.size(); ++i) {
    const Eigen::VectorXd sig = first_moments(res.sigma[i], res.k);
    const Eigen::VectorXd coeffs = coeff_vector(u.components[i], u.degree);
    out.push_back((M * coeffs - sig).norm());
  }
  return out;
}

}  // namespace roakit
