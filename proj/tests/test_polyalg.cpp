#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "roakit/polynomial.hpp"
#include "roakit/rng.hpp"

using namespace roakit;

namespace {

Polynomial x(int n, int j) { return Polynomial::variable(n, j); }

Polynomial random_poly(Rng& rng, int n, int deg, double density = 0.5) {
  Polynomial p(n);
  for (const auto& a : monomial_basis(n, deg)) {
    if (rng.uniform01() < density) p.add_term(a, rng.uniform(-2.0, 2.0));
  }
  if (p.is_zero()) p.add_term(MultiIndex::zero(n), 1.0);
  return p;
}

}  // namespace

TEST_CASE("monomial basis: univariate and low-degree cases") {
  auto b1 = monomial_basis(1, 2);
  REQUIRE(b1.size() == 3);
  CHECK(b1[0].exponents() == std::vector<int>{0});
  CHECK(b1[1].exponents() == std::vector<int>{1});
  CHECK(b1[2].exponents() == std::vector<int>{2});

  auto b2 = monomial_basis(2, 1);
  REQUIRE(b2.size() == 3);
  CHECK(b2[0].exponents() == (std::vector<int>{0, 0}));
  CHECK(b2[1].exponents() == (std::vector<int>{1, 0}));
  CHECK(b2[2].exponents() == (std::vector<int>{0, 1}));
}

TEST_CASE("monomial basis size matches brute-force enumeration") {
  // Oracle: count exponent triples with sum <= 4 directly.
  long count = 0;
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 4; ++b)
      for (int c = 0; c <= 4; ++c)
        if (a + b + c <= 4) ++count;
  CHECK(count == 35);
  CHECK(monomial_basis(3, 4).size() == 35);
  CHECK(basis_size(3, 4) == 35);
}

TEST_CASE("rank and unrank are mutually inverse") {
  for (int n = 1; n <= 4; ++n) {
    const auto basis = monomial_basis(n, 6);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      CHECK(rank_of(basis[i]) == i);
      CHECK(index_of_rank(n, i) == basis[i]);
    }
  }
}

TEST_CASE("graded-lex order is a strict total order on the basis") {
  const auto basis = monomial_basis(3, 5);
  for (std::size_t i = 0; i + 1 < basis.size(); ++i) {
    CHECK(basis[i] < basis[i + 1]);
    CHECK(!(basis[i + 1] < basis[i]));
    CHECK(!(basis[i] < basis[i]));
  }
}

TEST_CASE("arithmetic: difference of squares, annihilator, binomial square") {
  const auto x1 = x(2, 0), x2 = x(2, 1);
  CHECK((x1 + x2) * (x1 - x2) == x1 * x1 - x2 * x2);

  Rng rng(1);
  Polynomial p = random_poly(rng, 2, 3);
  CHECK((p * Polynomial(2)).is_zero());

  const Polynomial one = Polynomial::constant(2, 1.0);
  CHECK((one + x1) * (one + x1) == one + 2.0 * x1 + x1 * x1);
}

TEST_CASE("dimension mismatch is rejected") {
  CHECK_THROWS_AS(x(2, 0) + x(3, 0), DimensionMismatch);
  CHECK_THROWS_AS(x(2, 0) * x(3, 0), DimensionMismatch);
  CHECK_THROWS_AS(x(2, 0).evaluate({1.0, 2.0, 3.0}), DimensionMismatch);
}

TEST_CASE("gradient: quadratic, constant, monomial power rule") {
  const auto x1 = x(2, 0), x2 = x(2, 1);
  auto g = (x1 * x1 + x2 * x2).gradient();
  CHECK(g[0] == 2.0 * x1);
  CHECK(g[1] == 2.0 * x2);

  g = Polynomial::constant(2, 5.0).gradient();
  CHECK(g[0].is_zero());
  CHECK(g[1].is_zero());

  g = (x1 * x1 * x1 * x2).gradient();
  CHECK(g[0] == 3.0 * x1 * x1 * x2);
  CHECK(g[1] == x1 * x1 * x1);
}

TEST_CASE("lie derivative: drift field, constant, coordinate projection") {
  const auto x1 = x(2, 0), x2 = x(2, 1);
  const std::vector<Polynomial> field = {x2 + 0.1 * x1 * x1 * x1, Polynomial(2)};
  const Polynomial v = x1 * x1 + x2 * x2;
  CHECK(lie_derivative(v, field) == 2.0 * x1 * x2 + 0.2 * x1 * x1 * x1 * x1);

  CHECK(lie_derivative(Polynomial::constant(2, 1.0), field).is_zero());

  Rng rng(7);
  const std::vector<Polynomial> f2 = {random_poly(rng, 2, 2), random_poly(rng, 2, 2)};
  CHECK(lie_derivative(x1, f2) == f2[0]);
}

TEST_CASE("evaluate: sparse sum against sample points") {
  const auto x1 = x(2, 0), x2 = x(2, 1);
  CHECK((x1 * x1 + x2 * x2).evaluate({1.2, 0.0}) == doctest::Approx(1.44).epsilon(1e-15));
  const Polynomial p = 3.0 * x1 * x2 + Polynomial::constant(2, -2.5);
  CHECK(p.evaluate({0.0, 0.0}) == doctest::Approx(-2.5));
  const Polynomial gx = Polynomial::constant(2, 1.44) - x1 * x1 - x2 * x2;
  CHECK(gx.evaluate({0.0, 0.0}) == doctest::Approx(1.44));
}

TEST_CASE("canonical text round-trip") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.next() % 4);
    const Polynomial p = random_poly(rng, n, 5, 0.35);
    const Polynomial q = Polynomial::parse(p.to_string(), n);
    CHECK(p == q);
  }
  CHECK(Polynomial::parse("0", 2).is_zero());
  CHECK(Polynomial::parse("1.44 - x1^2 - x2^2", 2) ==
        Polynomial::constant(2, 1.44) - x(2, 0) * x(2, 0) - x(2, 1) * x(2, 1));
  CHECK(Polynomial::parse("x2 + 0.1 * x1^3", 2) ==
        x(2, 1) + 0.1 * x(2, 0) * x(2, 0) * x(2, 0));
}

TEST_CASE("parse errors carry a column") {
  try {
    Polynomial::parse("1 + * x1", 2);
    FAIL("expected a parse error");
  } catch (const PolyParseError& e) {
    CHECK(e.column > 0);
  }
  CHECK_THROWS_AS(Polynomial::parse("x3", 2), PolyParseError);
  CHECK_THROWS_AS(Polynomial::parse("", 2), PolyParseError);
  CHECK_THROWS_AS(Polynomial::parse("1 +", 2), PolyParseError);
}

TEST_CASE("lie derivative agrees with finite differences") {
  Rng rng(2024);
  const double h = 1e-6;
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng.next() % 2);
    const Polynomial v = random_poly(rng, n, 4, 0.4);
    std::vector<Polynomial> f;
    for (int j = 0; j < n; ++j) f.push_back(random_poly(rng, n, 4, 0.4));
    const Polynomial lv = lie_derivative(v, f);
    std::vector<double> pt(static_cast<std::size_t>(n));
    for (auto& c : pt) c = rng.uniform(-0.9, 0.9);
    std::vector<double> stepped(pt);
    for (int j = 0; j < n; ++j) stepped[static_cast<std::size_t>(j)] += h * f[static_cast<std::size_t>(j)].evaluate(pt);
    const double fd = (v.evaluate(stepped) - v.evaluate(pt)) / h;
    const double exact = lv.evaluate(pt);
    CHECK(std::abs(fd - exact) <= 1e-4 * (1.0 + std::abs(exact)));
  }
}

TEST_CASE("multiplication is commutative and associative") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2;
    const Polynomial a = random_poly(rng, n, 3, 0.5);
    const Polynomial b = random_poly(rng, n, 3, 0.5);
    const Polynomial c = random_poly(rng, n, 2, 0.5);
    const Polynomial ab = a * b, ba = b * a;
    for (const auto& [idx, coeff] : ab.terms()) {
      CHECK(std::abs(ba.coeff(idx) - coeff) <= 1e-12 * (1.0 + std::abs(coeff)));
    }
    const Polynomial l = (a * b) * c, r = a * (b * c);
    for (const auto& [idx, coeff] : l.terms()) {
      CHECK(std::abs(r.coeff(idx) - coeff) <= 1e-12 * (1.0 + std::abs(coeff)));
    }
  }
}

TEST_CASE("degree bookkeeping under products") {
  Rng rng(5);
  const Polynomial a = random_poly(rng, 2, 3, 0.6);
  const Polynomial b = random_poly(rng, 2, 4, 0.6);
  CHECK((a * b).degree() == a.degree() + b.degree());
}
