#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "roakit/rng.hpp"
#include "roakit/semialgebraic.hpp"

using namespace roakit;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

// Monte Carlo oracle with per-moment standard errors.
struct McOracle {
  MomentVector mean;
  MomentVector stderr_;
};

McOracle mc_oracle(const SemialgebraicSet& set, int d, long samples, std::uint64_t seed) {
  Rng rng(seed);
  const int n = set.n;
  const auto basis = monomial_basis(n, d);
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  Eigen::VectorXd x(n);
  for (long s = 0; s < samples; ++s) {
    for (int j = 0; j < n; ++j) x(j) = rng.uniform(set.box->lo(j), set.box->hi(j));
    if (!set.contains(x)) continue;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      double v = 1.0;
      for (int j = 0; j < n; ++j)
        for (int e = 0; e < basis[i][j]; ++e) v *= x(j);
      m1(static_cast<Eigen::Index>(i)) += v;
      m2(static_cast<Eigen::Index>(i)) += v * v;
    }
  }
  const double vol = set.box->volume();
  McOracle out{MomentVector(n, d), MomentVector(n, d)};
  for (Eigen::Index i = 0; i < m1.size(); ++i) {
    const double mu = m1(i) / static_cast<double>(samples);
    const double var = m2(i) / static_cast<double>(samples) - mu * mu;
    out.mean.values(i) = vol * mu;
    out.stderr_.values(i) = vol * std::sqrt(std::max(0.0, var) / static_cast<double>(samples));
  }
  return out;
}

}  // namespace

TEST_CASE("box moments: area, even power, odd symmetry") {
  const auto y = lebesgue_moments_box(vec2(-1, -1), vec2(1, 1), 4);
  CHECK(y.at(MultiIndex({0, 0})) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(y.at(MultiIndex({2, 0})) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(y.at(MultiIndex({1, 0})) == doctest::Approx(0.0));
}

TEST_CASE("box moments match Monte Carlo within 3 standard errors") {
  auto box = SemialgebraicSet::cube(vec2(-1, -0.5), vec2(0.7, 1.3));
  const auto exact = lebesgue_moments_box(box.box->lo, box.box->hi, 8);
  const auto mc = mc_oracle(box, 8, 1'000'000, 17);
  for (Eigen::Index i = 0; i < exact.values.size(); ++i) {
    const double se = std::max(mc.stderr_.values(i), 1e-12);
    CHECK(std::abs(exact.values(i) - mc.mean.values(i)) <= 3.0 * se);
  }
}

TEST_CASE("ball moments: mass, odd vanishing, even moment oracle") {
  // Disk of radius 1.2: mass equals the area, cross-checked by Monte Carlo.
  const auto y = lebesgue_moments_ball(vec2(0, 0), 1.2, 4);
  CHECK(y.at(MultiIndex({0, 0})) == doctest::Approx(kPi * 1.44).epsilon(1e-12));
  auto ball = SemialgebraicSet::ball(vec2(0, 0), 1.2);
  const auto mc = mc_oracle(ball, 2, 10'000'000, 23);
  CHECK(std::abs(y.at(MultiIndex({0, 0})) - mc.mean.at(MultiIndex({0, 0}))) <= 1e-3 * 4.0);

  CHECK(y.at(MultiIndex({1, 0})) == 0.0);
  CHECK(y.at(MultiIndex({1, 2})) == 0.0);

  // Polar-coordinates oracle for the unit disk: integral of x^2 =
  // int_0^1 r^3 dr * int_0^{2pi} cos^2 t dt = (1/4) * pi.
  const auto y1 = lebesgue_moments_ball(vec2(0, 0), 1.0, 2);
  const int nq = 20000;
  double quad = 0.0;
  for (int i = 0; i < nq; ++i) {
    const double t = 2.0 * kPi * (i + 0.5) / nq;
    quad += std::cos(t) * std::cos(t);
  }
  quad *= 2.0 * kPi / nq * 0.25;
  CHECK(y1.at(MultiIndex({2, 0})) == doctest::Approx(kPi / 4.0).epsilon(1e-12));
  CHECK(y1.at(MultiIndex({2, 0})) == doctest::Approx(quad).epsilon(1e-9));
}

TEST_CASE("centered ball moments obey the exact scaling law") {
  const auto y1 = lebesgue_moments_ball(Eigen::VectorXd::Zero(3), 1.0, 6);
  const double r = 1.7;
  const auto yr = lebesgue_moments_ball(Eigen::VectorXd::Zero(3), r, 6);
  for (const auto& a : monomial_basis(3, 6)) {
    const double expected = std::pow(r, 3 + a.degree()) * y1.at(a);
    CHECK(yr.at(a) == doctest::Approx(expected).epsilon(1e-13));
    if (a.degree() % 2 == 0 && a[0] % 2 == 0 && a[1] % 2 == 0 && a[2] % 2 == 0 &&
        a.degree() > 0) {
      CHECK(yr.at(a) > 0.0);
    }
  }
}

TEST_CASE("off-center ball moments match Monte Carlo") {
  auto ball = SemialgebraicSet::ball(vec2(0.3, -0.2), 0.9);
  const auto exact = lebesgue_moments_ball(vec2(0.3, -0.2), 0.9, 5);
  const auto mc = mc_oracle(ball, 5, 2'000'000, 31);
  for (Eigen::Index i = 0; i < exact.values.size(); ++i) {
    const double se = std::max(mc.stderr_.values(i), 1e-12);
    CHECK(std::abs(exact.values(i) - mc.mean.values(i)) <= 4.0 * se);
  }
}

TEST_CASE("complement pieces: one per target inequality") {
  auto X = SemialgebraicSet::ball(vec2(0, 0), 1.2);
  auto XT = SemialgebraicSet::ball(vec2(0, 0), 0.1);
  auto pieces = complement_pieces(X, XT);
  REQUIRE(pieces.size() == 1);
  CHECK(pieces[0].inequalities.size() == 2);

  // Two target inequalities give two pieces.
  auto XT2 = SemialgebraicSet::cube(vec2(-0.1, -0.1), vec2(0.1, 0.1));
  CHECK(complement_pieces(X, XT2).size() == 4);
}

TEST_CASE("complement pieces and the target cover the state set") {
  auto X = SemialgebraicSet::ball(vec2(0, 0), 1.2);
  auto XT = SemialgebraicSet::ball(vec2(0.2, 0.1), 0.4);
  auto pieces = complement_pieces(X, XT);
  for (const auto& x : sample_set(X, 500, 7)) {
    bool covered = XT.contains(x, 1e-12);
    for (const auto& p : pieces) covered = covered || p.contains(x, 1e-12);
    CHECK(covered);
  }
}

TEST_CASE("degenerate complement: target equals the state set") {
  auto X = SemialgebraicSet::ball(vec2(0, 0), 1.0);
  auto pieces = complement_pieces(X, X);
  REQUIRE(pieces.size() == 1);
  // The piece is the measure-zero circle; interior sampling cannot succeed.
  CHECK_THROWS_AS(sample_set(pieces[0], 10, 3), EmptyOrThin);
}

TEST_CASE("boundary pieces") {
  auto ball = SemialgebraicSet::ball(vec2(0, 0), 1.2);
  auto bp = boundary_pieces(ball);
  REQUIRE(bp.size() == 1);
  CHECK(bp[0].equalities.size() == 1);
  CHECK(bp[0].inequalities.empty());

  auto box = SemialgebraicSet::cube(vec2(-1, -1), vec2(1, 1));
  auto faces = boundary_pieces(box);
  REQUIRE(faces.size() == 4);
  for (const auto& f : faces) {
    CHECK(f.equalities.size() == 1);
    CHECK(f.inequalities.size() == 3);
  }

  SemialgebraicSet two;
  two.n = 2;
  two.inequalities = {ball.inequalities[0], box.inequalities[0]};
  auto bp2 = boundary_pieces(two);
  REQUIRE(bp2.size() == 2);
  CHECK(bp2[0].inequalities.size() == 1);
}

TEST_CASE("sampling: interior, boundary projection, empty set") {
  auto disk = SemialgebraicSet::ball(vec2(0, 0), 1.0);
  auto pts = sample_set(disk, 100, 11);
  REQUIRE(pts.size() == 100);
  for (const auto& p : pts) CHECK(p.norm() <= 1.0);

  auto circle = boundary_pieces(disk)[0];
  auto bpts = sample_set(circle, 50, 13);
  REQUIRE(bpts.size() == 50);
  for (const auto& p : bpts) {
    CHECK(std::abs(circle.equalities[0].evaluate(p.data(), 2)) <= 1e-9);
  }

  SemialgebraicSet empty;
  empty.n = 1;
  empty.inequalities.push_back(Polynomial::parse("-1 - x1^2", 1));
  empty.box = BoundingBox{Eigen::VectorXd::Constant(1, -1), Eigen::VectorXd::Constant(1, 1)};
  CHECK_THROWS_AS(sample_set(empty, 5, 1), EmptyOrThin);
}

TEST_CASE("sampling is deterministic per seed") {
  auto disk = SemialgebraicSet::ball(vec2(0, 0), 1.0);
  auto a = sample_set(disk, 25, 42);
  auto b = sample_set(disk, 25, 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("ball detection and bounding boxes") {
  auto g = Polynomial::parse("1.44 - x1^2 - x2^2", 2);
  auto ball = SemialgebraicSet::detect_ball(g);
  REQUIRE(ball.has_value());
  CHECK(ball->radius == doctest::Approx(1.2));
  CHECK(ball->center.norm() == doctest::Approx(0.0));

  auto off = Polynomial::parse("1 - x1^2 - x2^2 + 0.6 * x1", 2);
  auto b2 = SemialgebraicSet::detect_ball(off);
  REQUIRE(b2.has_value());
  CHECK(b2->center(0) == doctest::Approx(0.3));

  CHECK(!SemialgebraicSet::detect_ball(Polynomial::parse("1 - x1^2 - 2 * x2^2", 2)).has_value());
  CHECK(!SemialgebraicSet::detect_ball(Polynomial::parse("1 - x1^2 - x2^2 - x1 * x2", 2)).has_value());
}

TEST_CASE("set serialization round-trip") {
  auto X = SemialgebraicSet::ball(vec2(0, 0), 1.2);
  X.equalities.push_back(Polynomial::parse("x1 - x2", 2));
  auto lines = X.to_strings();
  auto back = SemialgebraicSet::from_strings(lines, 2);
  REQUIRE(back.inequalities.size() == 1);
  REQUIRE(back.equalities.size() == 1);
  CHECK(back.inequalities[0] == X.inequalities[0]);
  CHECK(back.equalities[0] == X.equalities[0]);
  CHECK(back.box.has_value());
}

TEST_CASE("generic sets fall back to Monte Carlo moments") {
  SemialgebraicSet wedge;
  wedge.n = 2;
  wedge.inequalities.push_back(Polynomial::parse("1 - x1^2 - x2^2", 2));
  wedge.inequalities.push_back(Polynomial::parse("x1", 2));
  wedge.box = BoundingBox{vec2(-1, -1), vec2(1, 1)};
  MonteCarloMeta meta;
  const auto y = lebesgue_moments(wedge, 2, &meta);
  CHECK(meta.samples > 0);
  CHECK(y.mass() == doctest::Approx(kPi / 2.0).epsilon(5e-3));
}
