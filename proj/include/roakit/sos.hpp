#pragma once

#include <map>
#include <vector>

#include "roakit/builder.hpp"
#include "roakit/moments.hpp"
#include "roakit/semialgebraic.hpp"

namespace roakit {

/// Polynomial whose coefficients are affine expressions over program
/// variables; the carrier for unknown certificate/controller polynomials
/// inside sum-of-squares constraints.
class AffinePoly {
 public:
  explicit AffinePoly(int n) : n_(n) {}
  static AffinePoly from(const Polynomial& p);
  /// Fresh free coefficient variables for every monomial of degree <= deg,
  /// in graded-lex order (also returned through coeff_vars).
  static AffinePoly unknown(int n, int deg, ProgramBuilder& builder,
                            std::vector<VarRef>* coeff_vars = nullptr);

  int dim() const { return n_; }
  const std::map<MultiIndex, LinExpr>& coeffs() const { return coeffs_; }
  void add(const MultiIndex& a, const LinExpr& e);

  AffinePoly& operator+=(const AffinePoly& o);
  AffinePoly& operator-=(const AffinePoly& o);
  AffinePoly& operator*=(double s);
  friend AffinePoly operator+(AffinePoly a, const AffinePoly& b) { return a += b; }
  friend AffinePoly operator-(AffinePoly a, const AffinePoly& b) { return a -= b; }
  friend AffinePoly operator*(AffinePoly a, double s) { return a *= s; }
  friend AffinePoly operator*(double s, AffinePoly a) { return a *= s; }

  AffinePoly derivative(int j) const;
  AffinePoly multiplied_by(const Polynomial& q) const;
  /// sum_j (d/dx_j) along the polynomial field.
  AffinePoly lie(const std::vector<Polynomial>& field) const;

 private:
  int n_;
  std::map<MultiIndex, LinExpr> coeffs_;
};

/// Support-constraint fragment of one measure: the moment matrix block, one
/// localizing block per inequality, and pinned-to-zero localizing rows per
/// equality.
struct MeasureBlockInfo {
  /// Blocks aligned with [1, inequalities...]: multiplier, basis half-degree,
  /// PSD block handle.
  struct Block {
    Polynomial multiplier;
    int half_degree = 0;
    PsdBlock psd;
  };
  std::vector<Block> blocks;
  std::vector<std::vector<int>> equality_rows;  // row ids per equality
};

/// Emits the PSD requirements M(y) >= 0 and M(g y) >= 0 for every inequality
/// plus M(h y) = 0 rows for every equality, over moments to degree d.
/// `y` holds one variable per graded-lex moment of degree <= d.
MeasureBlockInfo compile_measure_block(ProgramBuilder& builder, const std::vector<VarRef>& y,
                                       const SemialgebraicSet& set, int d);

/// One piece of a weighted-SOS decomposition: target = sigma_0 +
/// sum_j g_j * m_j where m_j is an SOS Gram polynomial or, for equality
/// multipliers, a free polynomial.
struct SosPiece {
  Polynomial g;
  bool free_multiplier = false;
};

struct SosConstraintInfo {
  PsdBlock gram0;
  std::vector<MeasureBlockInfo::Block> multiplier_blocks;  // SOS pieces
  std::vector<std::vector<VarRef>> free_multiplier_coeffs;  // free pieces
  std::vector<int> rows;               // coefficient-matching rows
  std::vector<MultiIndex> row_monomials;
};

/// Coefficient-matching equalities for target = sigma_0 + sum g_j m_j over
/// all monomials of degree <= d. Throws when the degree budget cannot hold
/// the pieces.
SosConstraintInfo compile_sos_constraint(ProgramBuilder& builder, const AffinePoly& target,
                                         const std::vector<SosPiece>& pieces, int d);

/// Convenience for sets: one SOS piece per inequality and one free piece per
/// equality of `set`.
std::vector<SosPiece> pieces_for(const SemialgebraicSet& set);

}  // namespace roakit
