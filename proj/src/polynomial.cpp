#include "roakit/polynomial.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace roakit {

namespace {

double ipow(double x, int e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= x;
    x *= x;
    e >>= 1;
  }
  return r;
}

}  // namespace

Polynomial::Polynomial(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("Polynomial: dimension must be >= 1");
}

Polynomial Polynomial::constant(int n, double c) {
  Polynomial p(n);
  p.add_term(MultiIndex::zero(n), c);
  return p;
}

Polynomial Polynomial::variable(int n, int j) {
  if (j < 0 || j >= n) throw std::invalid_argument("Polynomial::variable: index out of range");
  Polynomial p(n);
  p.add_term(MultiIndex::unit(n, j), 1.0);
  return p;
}

Polynomial Polynomial::monomial(const MultiIndex& a, double c) {
  Polynomial p(a.dim());
  p.add_term(a, c);
  return p;
}

int Polynomial::degree() const {
  return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

double Polynomial::coeff(const MultiIndex& a) const {
  auto it = terms_.find(a);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::constant_term() const { return coeff(MultiIndex::zero(n_)); }

Polynomial& Polynomial::add_term(const MultiIndex& a, double c) {
  if (a.dim() != n_) throw DimensionMismatch("Polynomial::add_term: dimension mismatch");
  auto [it, inserted] = terms_.emplace(a, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) < kCoeffDropTol) terms_.erase(it);
  return *this;
}

void Polynomial::drop_small() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) < kCoeffDropTol)
      it = terms_.erase(it);
    else
      ++it;
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& q) {
  if (q.n_ != n_) throw DimensionMismatch("Polynomial: dimension mismatch in +");
  for (const auto& [a, c] : q.terms_) add_term(a, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& q) {
  if (q.n_ != n_) throw DimensionMismatch("Polynomial: dimension mismatch in -");
  for (const auto& [a, c] : q.terms_) add_term(a, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  for (auto& [a, c] : terms_) c *= s;
  drop_small();
  return *this;
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  if (p.n_ != q.n_) throw DimensionMismatch("Polynomial: dimension mismatch in *");
  Polynomial r(p.n_);
  for (const auto& [a, ca] : p.terms_) {
    for (const auto& [b, cb] : q.terms_) {
      r.add_term(a.plus(b), ca * cb);
    }
  }
  r.drop_small();
  return r;
}

Polynomial Polynomial::derivative(int j) const {
  if (j < 0 || j >= n_) throw std::invalid_argument("Polynomial::derivative: index out of range");
  Polynomial r(n_);
  for (const auto& [a, c] : terms_) {
    if (a[j] == 0) continue;
    std::vector<int> e = a.exponents();
    const int aj = e[static_cast<std::size_t>(j)];
    e[static_cast<std::size_t>(j)] = aj - 1;
    r.add_term(MultiIndex(std::move(e)), c * aj);
  }
  return r;
}

std::vector<Polynomial> Polynomial::gradient() const {
  std::vector<Polynomial> g;
  g.reserve(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) g.push_back(derivative(j));
  return g;
}

double Polynomial::evaluate(const std::vector<double>& x) const {
  return evaluate(x.data(), static_cast<int>(x.size()));
}

double Polynomial::evaluate(const double* x, int n) const {
  if (n != n_) throw DimensionMismatch("Polynomial::evaluate: point dimension mismatch");
  double s = 0.0;
  for (const auto& [a, c] : terms_) {
    double t = c;
    for (int j = 0; j < n_; ++j) {
      if (a[j] != 0) t *= ipow(x[j], a[j]);
    }
    s += t;
  }
  return s;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  char buf[64];
  for (const auto& [a, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    std::snprintf(buf, sizeof(buf), "%.17g", c);
    os << buf;
    for (int j = 0; j < n_; ++j) {
      if (a[j] == 0) continue;
      os << " * x" << (j + 1);
      if (a[j] > 1) os << "^" << a[j];
    }
  }
  return os.str();
}

namespace {

struct Cursor {
  const std::string& s;
  std::size_t i = 0;
  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool done() {
    skip_ws();
    return i >= s.size();
  }
  char peek() {
    skip_ws();
    return i < s.size() ? s[i] : '\0';
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw PolyParseError(msg, static_cast<int>(i) + 1);
  }
};

double parse_number(Cursor& c) {
  c.skip_ws();
  const char* start = c.s.c_str() + c.i;
  char* end = nullptr;
  double v = std::strtod(start, &end);
  if (end == start) c.fail("expected a number");
  c.i += static_cast<std::size_t>(end - start);
  return v;
}

int parse_uint(Cursor& c) {
  c.skip_ws();
  if (c.i >= c.s.size() || !std::isdigit(static_cast<unsigned char>(c.s[c.i]))) {
    c.fail("expected an integer");
  }
  int v = 0;
  while (c.i < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.i]))) {
    v = v * 10 + (c.s[c.i] - '0');
    ++c.i;
  }
  return v;
}

}  // namespace

Polynomial Polynomial::parse(const std::string& text, int n) {
  Polynomial p(n);
  Cursor c{text};
  if (c.done()) c.fail("empty polynomial");
  bool negate = false;
  // Leading sign.
  if (c.peek() == '-') {
    negate = true;
    ++c.i;
  } else if (c.peek() == '+') {
    ++c.i;
  }
  while (true) {
    // One term: [number] ('*'? factor)* where factor = xJ['^'E].
    double coeff = 1.0;
    bool saw_anything = false;
    char ch = c.peek();
    if (ch != 'x') {
      coeff = parse_number(c);
      saw_anything = true;
    }
    std::vector<int> e(static_cast<std::size_t>(n), 0);
    while (true) {
      ch = c.peek();
      if (ch == '*') {
        ++c.i;
        ch = c.peek();
      } else if (ch != 'x') {
        break;
      }
      if (ch != 'x') c.fail("expected a variable after '*'");
      ++c.i;
      const int j = parse_uint(c);
      if (j < 1 || j > n) c.fail("variable index out of range");
      int ex = 1;
      if (c.peek() == '^') {
        ++c.i;
        ex = parse_uint(c);
      }
      e[static_cast<std::size_t>(j - 1)] += ex;
      saw_anything = true;
    }
    if (!saw_anything) c.fail("expected a term");
    p.add_term(MultiIndex(e), negate ? -coeff : coeff);
    if (c.done()) break;
    ch = c.peek();
    if (ch == '+') {
      negate = false;
      ++c.i;
    } else if (ch == '-') {
      negate = true;
      ++c.i;
    } else {
      c.fail("expected '+' or '-' between terms");
    }
    if (c.done()) c.fail("trailing operator");
  }
  return p;
}

Polynomial lie_derivative(const Polynomial& v, const std::vector<Polynomial>& field) {
  if (static_cast<int>(field.size()) != v.dim()) {
    throw DimensionMismatch("lie_derivative: field dimension mismatch");
  }
  Polynomial r(v.dim());
  for (int j = 0; j < v.dim(); ++j) {
    if (field[static_cast<std::size_t>(j)].dim() != v.dim()) {
      throw DimensionMismatch("lie_derivative: field component dimension mismatch");
    }
    r += v.derivative(j) * field[static_cast<std::size_t>(j)];
  }
  return r;
}

Polynomial shift(const Polynomial& p, const std::vector<double>& c) {
  const int n = p.dim();
  if (static_cast<int>(c.size()) != n) throw DimensionMismatch("shift: center dimension mismatch");
  // Precompute (x_j + c_j)^e for needed exponents per variable.
  Polynomial r(n);
  for (const auto& [a, ca] : p.terms()) {
    Polynomial term = Polynomial::constant(n, ca);
    for (int j = 0; j < n; ++j) {
      Polynomial base = Polynomial::variable(n, j) + Polynomial::constant(n, c[static_cast<std::size_t>(j)]);
      for (int e = 0; e < a[j]; ++e) term = term * base;
    }
    r += term;
  }
  return r;
}

}  // namespace roakit
