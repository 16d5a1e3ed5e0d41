#include "roakit/conic.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace roakit {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2 = 0.7071067811865475;
}  // namespace

void svec_pack(const Eigen::MatrixXd& S, double* out) {
  const int s = static_cast<int>(S.rows());
  int k = 0;
  for (int c = 0; c < s; ++c) {
    out[k++] = S(c, c);
    for (int r = c + 1; r < s; ++r) out[k++] = kSqrt2 * S(r, c);
  }
}

void svec_unpack(const double* v, int s, Eigen::MatrixXd& S) {
  S.resize(s, s);
  int k = 0;
  for (int c = 0; c < s; ++c) {
    S(c, c) = v[k++];
    for (int r = c + 1; r < s; ++r) {
      const double val = kInvSqrt2 * v[k++];
      S(r, c) = val;
      S(c, r) = val;
    }
  }
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::SlowProgress: return "SlowProgress";
  }
  return "?";
}

void ConicProgram::validate() const {
  const int N = cone.dim();
  if (A.cols() != N || c.size() != N) {
    throw std::invalid_argument("ConicProgram: variable dimension mismatch");
  }
  if (A.rows() != b.size()) throw std::invalid_argument("ConicProgram: row dimension mismatch");
  for (int s : cone.psd_sizes) {
    if (s < 1) throw std::invalid_argument("ConicProgram: invalid PSD block size");
  }
  if (cone.nonneg < 0 || cone.free_count < 0) {
    throw std::invalid_argument("ConicProgram: invalid cone counts");
  }
}

void ConicProgram::dump(std::ostream& os) const {
  os << "CONIC 1 " << A.rows() << " " << cone.dim() << "\n";
  for (int s : cone.psd_sizes) os << "PSD " << s << "\n";
  os << "NONNEG " << cone.nonneg << "\n";
  os << "FREE " << cone.free_count << "\n";
  char buf[64];
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    if (c(j) != 0.0) {
      std::snprintf(buf, sizeof(buf), "%.17g", c(j));
      os << "C " << j << " " << buf << "\n";
    }
  }
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    if (b(i) != 0.0) {
      std::snprintf(buf, sizeof(buf), "%.17g", b(i));
      os << "B " << i << " " << buf << "\n";
    }
  }
  for (int i = 0; i < A.outerSize(); ++i) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A, i); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%.17g", it.value());
      os << "A " << it.row() << " " << it.col() << " " << buf << "\n";
    }
  }
}

ConicProgram ConicProgram::load(std::istream& is) {
  std::string tag;
  int version = 0;
  long m = 0, N = 0;
  is >> tag >> version >> m >> N;
  if (tag != "CONIC" || version != 1) throw std::runtime_error("conic load: bad header");
  ConicProgram p;
  p.b = Eigen::VectorXd::Zero(m);
  p.c = Eigen::VectorXd::Zero(N);
  std::vector<Eigen::Triplet<double>> trips;
  while (is >> tag) {
    if (tag == "PSD") {
      int s;
      is >> s;
      p.cone.psd_sizes.push_back(s);
    } else if (tag == "NONNEG") {
      is >> p.cone.nonneg;
    } else if (tag == "FREE") {
      is >> p.cone.free_count;
    } else if (tag == "C") {
      long j;
      double v;
      is >> j >> v;
      p.c(j) = v;
    } else if (tag == "B") {
      long i;
      double v;
      is >> i >> v;
      p.b(i) = v;
    } else if (tag == "A") {
      long i, j;
      double v;
      is >> i >> j >> v;
      trips.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
    } else {
      throw std::runtime_error("conic load: unknown tag " + tag);
    }
  }
  p.A.resize(m, N);
  p.A.setFromTriplets(trips.begin(), trips.end());
  p.validate();
  return p;
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& S) {
  if (S.rows() != S.cols()) throw NotSymmetric("project_psd: matrix not square");
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw NotSymmetric("project_psd: matrix not symmetric within 1e-12");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
}

namespace {

void project_cone(const Cone& cone, Eigen::VectorXd& x, Eigen::MatrixXd& work,
                  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& eig) {
  int off = 0;
  for (int s : cone.psd_sizes) {
    if (s == 1) {
      x(off) = std::max(0.0, x(off));
      off += 1;
      continue;
    }
    svec_unpack(x.data() + off, s, work);
    eig.compute(work);
    const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
    work.noalias() = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
    svec_pack(work, x.data() + off);
    off += svec_len(s);
  }
  for (int i = 0; i < cone.nonneg; ++i, ++off) x(off) = std::max(0.0, x(off));
  // free segment untouched
}

struct Presolved {
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;
  Eigen::VectorXd b;
  std::vector<int> kept_rows;
  bool trivially_infeasible = false;
  int infeasible_row = -1;
};

Presolved presolve(const ConicProgram& prog) {
  Presolved out;
  const auto& A = prog.A;
  const long m = A.rows();
  std::map<std::vector<std::pair<int, double>>, int> seen;
  std::vector<int> keep;
  keep.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<int, double>> sig;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A, i); it; ++it) {
      if (it.value() != 0.0) sig.emplace_back(static_cast<int>(it.col()), it.value());
    }
    if (sig.empty()) {
      if (prog.b(i) != 0.0) {
        out.trivially_infeasible = true;
        out.infeasible_row = i;
        return out;
      }
      continue;
    }
    auto [itref, inserted] = seen.emplace(std::move(sig), i);
    if (!inserted) {
      if (prog.b(itref->second) != prog.b(i)) {
        out.trivially_infeasible = true;
        out.infeasible_row = i;
        return out;
      }
      continue;
    }
    keep.push_back(i);
  }
  out.kept_rows = keep;
  const long mk = static_cast<long>(keep.size());
  out.b.resize(mk);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(A.nonZeros()));
  for (long r = 0; r < mk; ++r) {
    const int i = keep[static_cast<std::size_t>(r)];
    out.b(r) = prog.b(i);
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A, i); it; ++it) {
      if (it.value() != 0.0) {
        trips.emplace_back(static_cast<int>(r), static_cast<int>(it.col()), it.value());
      }
    }
  }
  out.A.resize(mk, A.cols());
  out.A.setFromTriplets(trips.begin(), trips.end());
  return out;
}

void ruiz_scale(Eigen::SparseMatrix<double, Eigen::RowMajor>& A, const Cone& cone,
                int iters, Eigen::VectorXd& D, Eigen::VectorXd& E) {
  const long m = A.rows();
  const long N = A.cols();
  D = Eigen::VectorXd::Ones(m);
  E = Eigen::VectorXd::Ones(N);
  // Column groups: svec coordinates of one PSD block share a scale so the
  // scaling stays a cone isometry.
  std::vector<int> group(static_cast<std::size_t>(N));
  int ngroups = 0;
  {
    int off = 0;
    for (int s : cone.psd_sizes) {
      for (int k = 0; k < svec_len(s); ++k) group[static_cast<std::size_t>(off++)] = ngroups;
      ++ngroups;
    }
    for (int k = 0; k < cone.nonneg + cone.free_count; ++k) {
      group[static_cast<std::size_t>(off++)] = ngroups++;
    }
  }
  Eigen::VectorXd rnorm(m), gnorm(ngroups), dr(m), dg(ngroups);
  for (int it = 0; it < iters; ++it) {
    rnorm.setZero();
    gnorm.setZero();
    for (int i = 0; i < A.outerSize(); ++i) {
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator a(A, i); a; ++a) {
        const double v = std::abs(a.value());
        rnorm(a.row()) = std::max(rnorm(a.row()), v);
        const int g = group[static_cast<std::size_t>(a.col())];
        gnorm(g) = std::max(gnorm(g), v);
      }
    }
    for (long i = 0; i < m; ++i) dr(i) = rnorm(i) > 0 ? 1.0 / std::sqrt(rnorm(i)) : 1.0;
    for (int g = 0; g < ngroups; ++g) dg(g) = gnorm(g) > 0 ? 1.0 / std::sqrt(gnorm(g)) : 1.0;
    for (int i = 0; i < A.outerSize(); ++i) {
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator a(A, i); a; ++a) {
        a.valueRef() *= dr(a.row()) * dg(group[static_cast<std::size_t>(a.col())]);
      }
    }
    D.array() *= dr.array();
    for (long j = 0; j < N; ++j) E(j) *= dg(group[static_cast<std::size_t>(j)]);
  }
}

}  // namespace

ConicSolution solve(const ConicProgram& prog, double tol, long max_iter) {
  SolveOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return solve(prog, opts);
}

ConicSolution solve(const ConicProgram& prog, const SolveOptions& opts) {
  prog.validate();
  if (opts.tol < 1e-10 || opts.tol > 1e-2) {
    throw std::invalid_argument("solve: tol must lie in [1e-10, 1e-2]");
  }
  const Cone& cone = prog.cone;
  const long N = cone.dim();

  ConicSolution sol;
  sol.x = Eigen::VectorXd::Zero(N);
  sol.y = Eigen::VectorXd::Zero(prog.A.rows());
  sol.z = Eigen::VectorXd::Zero(N);

  Presolved pre = presolve(prog);
  if (pre.trivially_infeasible) {
    sol.status = SolveStatus::Infeasible;
    sol.certificate = Eigen::VectorXd::Zero(prog.A.rows());
    sol.certificate(pre.infeasible_row) = prog.b(pre.infeasible_row) > 0 ? -1.0 : 1.0;
    return sol;
  }
  const long m = pre.A.rows();
  if (m == 0) {
    Eigen::VectorXd negc = -prog.c;
    Eigen::MatrixXd wk;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ei;
    project_cone(cone, negc, wk, ei);
    if (negc.norm() > opts.tol) {
      sol.status = SolveStatus::Unbounded;
      sol.certificate = negc / std::max(1.0, negc.norm());
    } else {
      sol.status = SolveStatus::Optimal;
      sol.z = prog.c;
    }
    return sol;
  }

  Eigen::SparseMatrix<double, Eigen::RowMajor> As = pre.A;
  Eigen::VectorXd D, E;
  ruiz_scale(As, cone, opts.ruiz_iters, D, E);
  Eigen::VectorXd bs = D.cwiseProduct(pre.b);
  Eigen::VectorXd cs = E.cwiseProduct(prog.c);
  double sb = (1.0 + bs.norm()) / opts.b_weight;
  const double sc = 1.0 + cs.norm();
  bs /= sb;
  cs /= sc;

  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
  {
    Eigen::SparseMatrix<double> Ac = As;
    Eigen::SparseMatrix<double> AAt = (Ac * Eigen::SparseMatrix<double>(Ac.transpose())).pruned();
    Eigen::SparseMatrix<double> I(m, m);
    I.setIdentity();
    AAt = AAt + I;
    llt.compute(AAt);
  }
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("solve: Cholesky factorization of I + AA' failed");
  }

  const auto solve_M = [&](const Eigen::VectorXd& rx, const Eigen::VectorXd& ry,
                           Eigen::VectorXd& hx, Eigen::VectorXd& hy) {
    hy = llt.solve(ry - As * rx);
    hx.noalias() = rx + As.transpose() * hy;
  };
  Eigen::VectorXd Fg_x(N), Fg_y(m);
  solve_M(cs, -bs, Fg_x, Fg_y);
  double sm_denom = 1.0 + cs.dot(Fg_x) - bs.dot(Fg_y);

  const long dim = N + m + 1;
  // Canonical splitting state w: utilde = (I+Q)^{-1} w, u = Pi_C(2 utilde - w),
  // w+ = w + alpha (u - utilde). At the fixed point u = utilde, v = w - u lies
  // in the dual cone and Q u = v.
  Eigen::VectorXd w(dim), wnext(dim), wtrial(dim), wttrial(dim);
  w.setZero();
  w(N + m) = 1.0;

  Eigen::VectorXd ut(dim), up(dim);            // utilde and projected u
  Eigen::VectorXd ut_tr(dim), up_tr(dim);      // trial-step scratch
  Eigen::VectorXd rx(N), ry(m), hx(N), hy(m);
  Eigen::MatrixXd blockwork;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  const double alpha = opts.relaxation;

  const auto apply_step = [&](const Eigen::VectorXd& win, Eigen::VectorXd& wout,
                              Eigen::VectorXd& utilde, Eigen::VectorXd& uproj) {
    const double wtau = win(N + m);
    rx = win.segment(0, N) - wtau * cs;
    ry = win.segment(N, m) + wtau * bs;
    solve_M(rx, ry, hx, hy);
    const double corr = (cs.dot(hx) - bs.dot(hy)) / sm_denom;
    hx -= corr * Fg_x;
    hy -= corr * Fg_y;
    utilde.segment(0, N) = hx;
    utilde.segment(N, m) = hy;
    utilde(N + m) = wtau + cs.dot(hx) - bs.dot(hy);

    uproj = 2.0 * utilde - win;
    Eigen::VectorXd xpart = uproj.segment(0, N);
    project_cone(cone, xpart, blockwork, eig);
    uproj.segment(0, N) = xpart;
    uproj(N + m) = std::max(0.0, uproj(N + m));
    wout = win + alpha * (uproj - utilde);
  };

  // Projection onto the dual cone (free coordinates dualize to zero).
  const auto project_dual = [&](Eigen::VectorXd& z) {
    Eigen::MatrixXd wk;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ei;
    project_cone(cone, z, wk, ei);  // PSD and nonneg parts are self-dual
    const int foff = cone.psd_dim() + cone.nonneg;
    for (int i = 0; i < cone.free_count; ++i) z(foff + i) = 0.0;
  };

  // Anderson acceleration history (type II, safeguarded).
  const int mem = std::max(0, opts.anderson_memory);
  Eigen::MatrixXd hist_s, hist_r;
  int hist_count = 0;
  if (mem > 0) {
    hist_s.resize(dim, mem + 1);
    hist_r.resize(dim, mem + 1);
  }

  const double bnorm1 = 1.0 + pre.b.norm();
  const double cnorm1 = 1.0 + prog.c.norm();
  Eigen::VectorXd cand_x(N), cand_y(m), cand_z(N), zscaled(N);

  const auto expand_y = [&](const Eigen::VectorXd& ykept) {
    Eigen::VectorXd yfull = Eigen::VectorXd::Zero(prog.A.rows());
    for (long r = 0; r < m; ++r) yfull(pre.kept_rows[static_cast<std::size_t>(r)]) = ykept(r);
    return yfull;
  };

  double prev_objp = std::numeric_limits<double>::quiet_NaN();
  double prev_pres = std::numeric_limits<double>::quiet_NaN();
  int divergence_strikes = 0;
  long aa_accepted = 0, aa_rejected = 0;

  // Stall-triggered rebalancing of the rhs weight: some program structures
  // favor a heavier rhs, others a lighter one, so a stalled run walks a
  // fixed ladder of multipliers (deterministic schedule).
  static constexpr double kLadder[] = {4.0, 16.0, 0.25, 64.0, 0.0625, 256.0, 0.015625, 1.0};
  int ladder_pos = -1;
  double prev_window_floor = std::numeric_limits<double>::infinity();
  double cur_window_floor = std::numeric_limits<double>::infinity();
  long next_rebalance_check = 0;
  const long rebalance_every = std::max<long>(4000, 200L * opts.check_interval);
  const auto rebalance_to = [&](double mult) {
    const double sb_new = (1.0 + (bs * sb).norm()) / (opts.b_weight * mult);
    bs *= sb / sb_new;
    sb = sb_new;
    solve_M(cs, -bs, Fg_x, Fg_y);
    sm_denom = 1.0 + cs.dot(Fg_x) - bs.dot(Fg_y);
    hist_count = 0;
    divergence_strikes = 0;
    prev_objp = std::numeric_limits<double>::quiet_NaN();
    prev_pres = std::numeric_limits<double>::quiet_NaN();
  };

  long it = 0;
  for (; it < opts.max_iter; ++it) {
    // The map is positively homogeneous; fixing the iterate norm removes
    // free drift along the scale direction of the embedding.
    const double wn = w.norm();
    if (wn > 0.0) w *= 1.0 / wn;
    apply_step(w, wnext, ut, up);

    if (mem > 0) {
      const int col = hist_count % (mem + 1);
      hist_s.col(col) = w;
      hist_r.col(col) = wnext - w;
      ++hist_count;
      const int have = std::min(hist_count, mem + 1);
      if (have >= 3 && hist_count % opts.anderson_interval == 0) {
        const int j = have - 1;
        Eigen::MatrixXd dS(dim, j), dR(dim, j);
        for (int c = 0; c < j; ++c) {
          const int newer = (hist_count - 1 - c + (mem + 1)) % (mem + 1);
          const int older = (hist_count - 2 - c + (mem + 1)) % (mem + 1);
          dS.col(j - 1 - c) = hist_s.col(newer) - hist_s.col(older);
          dR.col(j - 1 - c) = hist_r.col(newer) - hist_r.col(older);
        }
        const Eigen::VectorXd rlast = hist_r.col((hist_count - 1) % (mem + 1));
        Eigen::MatrixXd Gm = dR.transpose() * dR;
        Gm.diagonal().array() += 1e-12 * (1.0 + Gm.trace());
        const Eigen::VectorXd theta = Gm.ldlt().solve(dR.transpose() * rlast);
        wtrial = w + rlast - (dS + dR) * theta;
        apply_step(wtrial, wttrial, ut_tr, up_tr);
        if ((wttrial - wtrial).norm() < opts.anderson_safeguard * rlast.norm()) {
          w = wttrial;
          ut = ut_tr;
          up = up_tr;
          hist_count = 0;
          ++aa_accepted;
        } else {
          w = wnext;
          ++aa_rejected;
        }
      } else {
        w = wnext;
      }
    } else {
      w = wnext;
    }

    if ((it + 1) % opts.check_interval != 0 && it + 1 != opts.max_iter) continue;

    const double tau = up(N + m);
    const double unorm = up.norm();
    if (tau > 1e-12 * std::max(1.0, unorm)) {
      cand_x = (sb / tau) * E.cwiseProduct(up.segment(0, N));
      cand_y = (sc / tau) * D.cwiseProduct(ut.segment(N, m));
      zscaled = w.segment(0, N) - ut.segment(0, N);
      project_dual(zscaled);
      cand_z = (sc / tau) * zscaled.cwiseQuotient(E);
      const double pres = (pre.A * cand_x - pre.b).norm() / bnorm1;
      const double dres = (pre.A.transpose() * cand_y + cand_z - prog.c).norm() / cnorm1;
      const double objp = prog.c.dot(cand_x);
      const double objd = pre.b.dot(cand_y);
      const double gap = std::abs(objp - objd) / (1.0 + std::abs(objp) + std::abs(objd));
      if (opts.verbose && (it + 1) % (opts.check_interval * 40) == 0) {
        std::fprintf(stderr,
                     "  it %6ld  pres %8.2e  dres %8.2e  gap %8.2e  obj %12.6e  aa %ld/%ld\n",
                     it + 1, pres, dres, gap, objp, aa_accepted, aa_accepted + aa_rejected);
      }
      if (pres <= opts.tol && dres <= opts.tol && gap <= opts.tol) {
        sol.x = cand_x;
        sol.y = expand_y(cand_y);
        sol.z = cand_z;
        sol.status = SolveStatus::Optimal;
        sol.residuals = {pres, dres, gap};
        sol.objective_primal = objp;
        sol.objective_dual = objd;
        sol.iterations = it + 1;
        return sol;
      }
      const double resmax = std::max({pres, dres, gap});
      cur_window_floor = std::min(cur_window_floor, resmax);
      if (it + 1 >= next_rebalance_check) {
        // Stalled when the best residual of this window failed to halve the
        // previous window's best.
        if (next_rebalance_check > 0 && cur_window_floor > 0.5 * prev_window_floor &&
            ladder_pos + 1 < static_cast<int>(sizeof(kLadder) / sizeof(kLadder[0]))) {
          ++ladder_pos;
          rebalance_to(kLadder[ladder_pos]);
          if (opts.verbose) {
            std::fprintf(stderr, "  it %6ld  rebalance rhs weight x%g (resmax %.2e)\n", it + 1,
                         kLadder[ladder_pos], resmax);
          }
          prev_window_floor = std::numeric_limits<double>::infinity();
        } else {
          prev_window_floor = cur_window_floor;
        }
        cur_window_floor = std::numeric_limits<double>::infinity();
        next_rebalance_check = it + 1 + rebalance_every;
      }
      // Weakly unbounded problems admit no finite improving ray; they show
      // up as a vanishing gap with stalled feasibility residuals while the
      // objective dives. Require the signature over consecutive checks.
      const bool stalled = std::isfinite(prev_pres) && pres > 100.0 * opts.tol &&
                           std::abs(pres - prev_pres) <= 0.01 * pres;
      const bool diving = std::isfinite(prev_objp) && objp < prev_objp &&
                          objp < -opts.unbounded_objective;
      if (gap <= std::max(opts.tol, 1e-4) && stalled && diving) {
        ++divergence_strikes;
      } else {
        divergence_strikes = 0;
      }
      prev_objp = objp;
      prev_pres = pres;
      if (divergence_strikes >= 10) {
        sol.status = SolveStatus::Unbounded;
        sol.certificate = cand_x / std::max(1.0, -objp);
        sol.residuals = {pres, dres, gap};
        sol.objective_primal = objp;
        sol.objective_dual = objd;
        sol.iterations = it + 1;
        sol.x = cand_x;
        sol.y = expand_y(cand_y);
        sol.z = cand_z;
        return sol;
      }
    }
    // Infeasibility certificates from the homogeneous iterate.
    const double bty = bs.dot(ut.segment(N, m));
    if (bty > 1e-14) {
      zscaled = w.segment(0, N) - ut.segment(0, N);
      project_dual(zscaled);
      const double infres = (As.transpose() * ut.segment(N, m) + zscaled).norm() / bty;
      if (infres <= opts.tol) {
        sol.status = SolveStatus::Infeasible;
        Eigen::VectorXd ycert = D.cwiseProduct(ut.segment(N, m));
        const double scale_c = pre.b.dot(ycert);
        sol.certificate = expand_y(ycert / (scale_c == 0.0 ? 1.0 : scale_c));
        sol.iterations = it + 1;
        return sol;
      }
    }
    const double ctx = cs.dot(up.segment(0, N));
    if (ctx < -1e-14) {
      const double ubres = (As * up.segment(0, N)).norm() / (-ctx);
      if (ubres <= opts.tol) {
        sol.status = SolveStatus::Unbounded;
        Eigen::VectorXd xcert = E.cwiseProduct(up.segment(0, N));
        const double scale_c = -prog.c.dot(xcert);
        sol.certificate = xcert / (scale_c == 0.0 ? 1.0 : scale_c);
        sol.iterations = it + 1;
        return sol;
      }
    }
  }

  sol.status = SolveStatus::SlowProgress;
  sol.iterations = it;
  {
    const double tau = up.size() == dim ? up(N + m) : 0.0;
    if (tau > 1e-12 * std::max(1.0, up.norm())) {
      sol.x = (sb / tau) * E.cwiseProduct(up.segment(0, N));
      Eigen::VectorXd ykept = (sc / tau) * D.cwiseProduct(ut.segment(N, m));
      sol.y = expand_y(ykept);
      zscaled = w.segment(0, N) - ut.segment(0, N);
      project_dual(zscaled);
      sol.z = (sc / tau) * zscaled.cwiseQuotient(E);
      sol.residuals.primal = (pre.A * sol.x - pre.b).norm() / bnorm1;
      sol.residuals.dual = (pre.A.transpose() * ykept + sol.z - prog.c).norm() / cnorm1;
      sol.objective_primal = prog.c.dot(sol.x);
      sol.objective_dual = pre.b.dot(ykept);
      sol.residuals.gap = std::abs(sol.objective_primal - sol.objective_dual) /
                          (1.0 + std::abs(sol.objective_primal) + std::abs(sol.objective_dual));
    }
  }
  return sol;
}

}  // namespace roakit
