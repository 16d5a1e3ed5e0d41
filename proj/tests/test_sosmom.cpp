#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "roakit/rng.hpp"
#include "roakit/semialgebraic.hpp"
#include "roakit/sos.hpp"

using namespace roakit;

namespace {

MomentVector dirac_moments(const std::vector<double>& pt, int d) {
  const int n = static_cast<int>(pt.size());
  MomentVector y(n, d);
  const auto basis = monomial_basis(n, d);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double v = 1.0;
    for (int j = 0; j < n; ++j)
      for (int e = 0; e < basis[i][j]; ++e) v *= pt[static_cast<std::size_t>(j)];
    y.values(static_cast<Eigen::Index>(i)) = v;
  }
  return y;
}

MomentVector lebesgue_1d(double lo, double hi, int d) {
  Eigen::VectorXd l(1), h(1);
  l << lo;
  h << hi;
  return lebesgue_moments_box(l, h, d);
}

// Composite-Simpson oracle for 1-D integrals of a polynomial times weight.
double integral_1d(const Polynomial& p, double lo, double hi) {
  const int n = 2000;
  double s = 0.0;
  const double h = (hi - lo) / n;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * p.evaluate(&x, 1);
  }
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("moment matrix: Lebesgue, Dirac, zero measure") {
  const auto y = lebesgue_1d(-1, 1, 2);
  Eigen::MatrixXd M = moment_matrix(y, 1);
  CHECK(M(0, 0) == doctest::Approx(2.0));
  CHECK(M(0, 1) == doctest::Approx(0.0));
  CHECK(M(1, 1) == doctest::Approx(2.0 / 3.0));

  const double a = 0.7;
  const auto yd = dirac_moments({a}, 2);
  Eigen::MatrixXd Md = moment_matrix(yd, 1);
  CHECK(Md(0, 0) == doctest::Approx(1.0));
  CHECK(Md(0, 1) == doctest::Approx(a));
  CHECK(Md(1, 1) == doctest::Approx(a * a));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Md);
  CHECK(eig.eigenvalues()(0) == doctest::Approx(0.0).epsilon(1e-12));  // rank 1

  MomentVector zero(1, 2);
  CHECK(moment_matrix(zero, 1).norm() == 0.0);
}

TEST_CASE("localizing matrix basics") {
  const auto y = lebesgue_1d(-1, 1, 4);
  // Unit multiplier coincides with the moment matrix.
  const Polynomial one = Polynomial::constant(1, 1.0);
  CHECK((localizing_matrix(y, one, 2) - moment_matrix(y, 2)).norm() == 0.0);

  // Dirac at a with g(a) > 0: rank-one PSD matrix scaled by g(a).
  const double a = 0.4;
  const auto yd = dirac_moments({a}, 4);
  const Polynomial g = Polynomial::parse("1 - x1^2", 1);
  Eigen::MatrixXd Lg = localizing_matrix(yd, g, 1);
  Eigen::MatrixXd Md = moment_matrix(yd, 1);
  CHECK((Lg - g.evaluate(&a, 1) * Md).norm() <= 1e-12);

  // Lebesgue on [-1,1] against 1 - x^2 at k = 1: 1-D integral oracle.
  Eigen::MatrixXd L = localizing_matrix(y, g, 1);
  const Polynomial x1 = Polynomial::variable(1, 0);
  CHECK(L(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(L(0, 1) == doctest::Approx(0.0));
  CHECK(L(1, 1) == doctest::Approx(4.0 / 15.0).epsilon(1e-12));
  CHECK(L(0, 0) == doctest::Approx(integral_1d(g, -1, 1)).epsilon(1e-9));
  CHECK(L(1, 1) == doctest::Approx(integral_1d(g * x1 * x1, -1, 1)).epsilon(1e-9));
}

TEST_CASE("localizing matrix is linear in the multiplier") {
  Rng rng(3);
  MomentVector y(2, 6);
  for (Eigen::Index i = 0; i < y.values.size(); ++i) y.values(i) = rng.uniform(-1, 1);
  const Polynomial g1 = Polynomial::parse("1 - x1^2 - x2^2", 2);
  const Polynomial g2 = Polynomial::parse("0.3 + x1 * x2", 2);
  const Eigen::MatrixXd sum = localizing_matrix(y, g1 + g2, 2);
  const Eigen::MatrixXd parts = localizing_matrix(y, g1, 2) + localizing_matrix(y, g2, 2);
  // Exact up to summation reassociation in coefficient merging.
  CHECK((sum - parts).norm() <= 1e-14 * (1.0 + parts.norm()));
}

TEST_CASE("degree shortfall is rejected") {
  const auto y = lebesgue_1d(-1, 1, 2);
  CHECK_THROWS_AS(moment_matrix(y, 2), std::invalid_argument);
  CHECK_THROWS_AS(localizing_matrix(y, Polynomial::parse("1 - x1^2", 1), 1),
                  std::invalid_argument);
}

TEST_CASE("measure block sizes: ball at degree 4") {
  Eigen::VectorXd c0 = Eigen::VectorXd::Zero(2);
  auto X = SemialgebraicSet::ball(c0, 1.2);
  ProgramBuilder bld;
  auto y = bld.add_free(static_cast<int>(basis_size(2, 4)));
  auto info = compile_measure_block(bld, y, X, 4);
  REQUIRE(info.blocks.size() == 2);  // moment matrix + one localizing block
  CHECK(info.blocks[0].psd.size == 6);
  CHECK(info.blocks[1].psd.size == 3);
  CHECK(info.equality_rows.empty());
}

TEST_CASE("measure block: equality support pins localizing rows") {
  Eigen::VectorXd c0 = Eigen::VectorXd::Zero(2);
  auto circle = boundary_pieces(SemialgebraicSet::ball(c0, 1.0))[0];
  ProgramBuilder bld;
  auto y = bld.add_free(static_cast<int>(basis_size(2, 4)));
  auto info = compile_measure_block(bld, y, circle, 4);
  REQUIRE(info.blocks.size() == 1);  // just the moment matrix
  REQUIRE(info.equality_rows.size() == 1);
  CHECK(info.equality_rows[0].size() == 6);  // 3x3 lower triangle

  // Dirac on the circle satisfies the pinned rows; an interior point breaks
  // them.
  auto prog = bld.build();
  Eigen::MatrixXd A(prog.A);
  const auto on = dirac_moments({1.0, 0.0}, 4);
  const auto in = dirac_moments({0.5, 0.0}, 4);
  for (int row : info.equality_rows[0]) {
    double s_on = 0.0, s_in = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double a = A(row, bld.flat_index(y[i]));
      s_on += a * on.values(static_cast<Eigen::Index>(i));
      s_in += a * in.values(static_cast<Eigen::Index>(i));
    }
    CHECK(std::abs(s_on) <= 1e-12);
    if (row == info.equality_rows[0][0]) CHECK(std::abs(s_in) > 1e-3);
  }
}

TEST_CASE("measure block: two inequalities give two localizing blocks") {
  SemialgebraicSet s;
  s.n = 2;
  s.inequalities.push_back(Polynomial::parse("1 - x1^2 - x2^2", 2));
  s.inequalities.push_back(Polynomial::parse("x1", 2));
  ProgramBuilder bld;
  auto y = bld.add_free(static_cast<int>(basis_size(2, 4)));
  auto info = compile_measure_block(bld, y, s, 4);
  REQUIRE(info.blocks.size() == 3);
  CHECK(info.blocks[1].psd.size == 3);  // degree-2 multiplier, half-degree 1
  CHECK(info.blocks[2].psd.size == 3);  // degree-1 multiplier, half-degree 1
}

TEST_CASE("sos feasibility: perfect square target") {
  // x^2 admits the Gram decomposition diag(0, 1) over basis {1, x}.
  ProgramBuilder bld;
  auto target = AffinePoly::from(Polynomial::parse("x1^2", 1));
  auto info = compile_sos_constraint(bld, target, {}, 2);
  auto prog = bld.build();
  auto sol = solve(prog, 1e-8, 50000);
  REQUIRE(sol.status == SolveStatus::Optimal);
  // Decode the Gram block and check the identity coefficient-wise.
  Eigen::MatrixXd Q;
  svec_unpack(sol.x.data() + bld.block_offset(info.gram0), info.gram0.size, Q);
  const auto basis = monomial_basis(1, 1);
  Polynomial rec(1);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) rec.add_term(basis[r].plus(basis[c]), Q(r, c));
  CHECK(std::abs(rec.coeff(MultiIndex({2})) - 1.0) <= 1e-6);
  CHECK(std::abs(rec.coeff(MultiIndex({0}))) <= 1e-6);
}

TEST_CASE("sos infeasibility: negative constant") {
  ProgramBuilder bld;
  auto target = AffinePoly::from(Polynomial::constant(1, -1.0));
  compile_sos_constraint(bld, target, {}, 2);
  auto prog = bld.build();
  auto sol = solve(prog, 1e-8, 100000);
  CHECK(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("sos with multiplier: 1 - x^2 on its own superlevel set") {
  // 1 - x^2 = sigma0 + (1 - x^2) * s with sigma0 = 0, s = 1.
  ProgramBuilder bld;
  const Polynomial g = Polynomial::parse("1 - x1^2", 1);
  auto target = AffinePoly::from(g);
  auto info = compile_sos_constraint(bld, target, {{g, false}}, 2);
  auto prog = bld.build();
  auto sol = solve(prog, 1e-8, 50000);
  REQUIRE(sol.status == SolveStatus::Optimal);
  REQUIRE(info.multiplier_blocks.size() == 1);
}

TEST_CASE("sos round-trip identity after solving") {
  // Random target built from a known decomposition; the solved Gram blocks
  // must reproduce the target coefficient-wise.
  Rng rng(13);
  const int n = 2, d = 4;
  const Polynomial g = Polynomial::parse("1 - x1^2 - x2^2", 2);
  const auto b2 = monomial_basis(n, 2);
  const auto b1 = monomial_basis(n, 1);
  Eigen::MatrixXd R0(b2.size(), b2.size()), R1(b1.size(), b1.size());
  for (Eigen::Index i = 0; i < R0.rows(); ++i)
    for (Eigen::Index j = 0; j < R0.cols(); ++j) R0(i, j) = rng.uniform(-1, 1);
  for (Eigen::Index i = 0; i < R1.rows(); ++i)
    for (Eigen::Index j = 0; j < R1.cols(); ++j) R1(i, j) = rng.uniform(-1, 1);
  Eigen::MatrixXd Q0 = R0 * R0.transpose();
  Eigen::MatrixXd Q1 = R1 * R1.transpose();
  Polynomial target(n);
  for (std::size_t r = 0; r < b2.size(); ++r)
    for (std::size_t c = 0; c < b2.size(); ++c)
      target.add_term(b2[r].plus(b2[c]), Q0(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
  Polynomial s1(n);
  for (std::size_t r = 0; r < b1.size(); ++r)
    for (std::size_t c = 0; c < b1.size(); ++c)
      s1.add_term(b1[r].plus(b1[c]), Q1(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
  target += g * s1;

  ProgramBuilder bld;
  auto info = compile_sos_constraint(bld, AffinePoly::from(target), {{g, false}}, d);
  auto prog = bld.build();
  auto sol = solve(prog, 1e-8, 200000);
  REQUIRE(sol.status == SolveStatus::Optimal);

  Eigen::MatrixXd G0, G1;
  svec_unpack(sol.x.data() + bld.block_offset(info.gram0), info.gram0.size, G0);
  svec_unpack(sol.x.data() + bld.block_offset(info.multiplier_blocks[0].psd),
              info.multiplier_blocks[0].psd.size, G1);
  Polynomial rec(n);
  for (std::size_t r = 0; r < b2.size(); ++r)
    for (std::size_t c = 0; c < b2.size(); ++c)
      rec.add_term(b2[r].plus(b2[c]), G0(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
  Polynomial smul(n);
  for (std::size_t r = 0; r < b1.size(); ++r)
    for (std::size_t c = 0; c < b1.size(); ++c)
      smul.add_term(b1[r].plus(b1[c]), G1(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
  rec += g * smul;
  for (const auto& [idx, coeff] : target.terms()) {
    CHECK(std::abs(rec.coeff(idx) - coeff) <= 1e-7 * (1.0 + std::abs(coeff)));
  }
}

TEST_CASE("degree budget violations are rejected") {
  ProgramBuilder bld;
  auto target = AffinePoly::from(Polynomial::parse("x1^4", 1));
  CHECK_THROWS_AS(compile_sos_constraint(bld, target, {}, 2), std::invalid_argument);
}
