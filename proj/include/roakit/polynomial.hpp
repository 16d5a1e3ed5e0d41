#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "roakit/multiindex.hpp"

namespace roakit {

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Error from Polynomial::parse; `column` is the 1-based offset into the text.
class PolyParseError : public std::runtime_error {
 public:
  PolyParseError(const std::string& what, int column)
      : std::runtime_error(what), column(column) {}
  int column;
};

/// Sparse multivariate polynomial with real coefficients.
///
/// Terms are kept in a graded-lex ordered map in canonical form: no stored
/// zero coefficients, and coefficients with |c| < 1e-14 are dropped after
/// arithmetic. Values are immutable after construction apart from the
/// fluent compound operators; all operations are pure and thread-safe on
/// distinct objects.
class Polynomial {
 public:
  static constexpr double kCoeffDropTol = 1e-14;

  /// Zero polynomial in one variable; placeholder for members assigned later.
  Polynomial() : n_(1) {}
  explicit Polynomial(int n);
  static Polynomial constant(int n, double c);
  static Polynomial variable(int n, int j);  // x_{j+1}, 0-based j
  static Polynomial monomial(const MultiIndex& a, double c);

  int dim() const { return n_; }
  /// Total degree; 0 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  double coeff(const MultiIndex& a) const;
  double constant_term() const;
  const std::map<MultiIndex, double>& terms() const { return terms_; }

  Polynomial& operator+=(const Polynomial& q);
  Polynomial& operator-=(const Polynomial& q);
  Polynomial& operator*=(double s);
  Polynomial& add_term(const MultiIndex& a, double c);

  friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
  friend Polynomial operator-(Polynomial p, const Polynomial& q) { return p -= q; }
  friend Polynomial operator*(Polynomial p, double s) { return p *= s; }
  friend Polynomial operator*(double s, Polynomial p) { return p *= s; }
  friend Polynomial operator-(Polynomial p) { return p *= -1.0; }
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
  friend bool operator==(const Polynomial& p, const Polynomial& q) {
    return p.n_ == q.n_ && p.terms_ == q.terms_;
  }

  Polynomial derivative(int j) const;
  std::vector<Polynomial> gradient() const;
  double evaluate(const std::vector<double>& x) const;
  double evaluate(const double* x, int n) const;

  /// Canonical text form: terms in graded-lex order joined by " + ",
  /// each as "c" or "c * x1^a1 * ...". Round-trips exactly through parse.
  std::string to_string() const;
  static Polynomial parse(const std::string& text, int n);

 private:
  void drop_small();
  int n_;
  std::map<MultiIndex, double> terms_;
};

/// Directional derivative of v along the field: sum_j (dv/dx_j) * field_j.
Polynomial lie_derivative(const Polynomial& v, const std::vector<Polynomial>& field);

/// p composed with the shift x -> x + c (expands (x+c)^alpha).
Polynomial shift(const Polynomial& p, const std::vector<double>& c);

}  // namespace roakit
