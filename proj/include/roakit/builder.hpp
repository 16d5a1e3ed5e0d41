#pragma once

#include <map>
#include <vector>

#include "roakit/conic.hpp"

namespace roakit {

struct VarRef {
  int id = -1;
  bool valid() const { return id >= 0; }
};

/// Affine expression over builder variables.
struct LinExpr {
  double constant = 0.0;
  std::vector<std::pair<VarRef, double>> terms;

  LinExpr() = default;
  LinExpr(double c) : constant(c) {}  // NOLINT implicit
  LinExpr(VarRef v, double coeff = 1.0) { terms.push_back({v, coeff}); }

  LinExpr& operator+=(const LinExpr& o) {
    constant += o.constant;
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    return *this;
  }
  LinExpr& operator-=(const LinExpr& o) {
    constant -= o.constant;
    for (const auto& [v, c] : o.terms) terms.push_back({v, -c});
    return *this;
  }
  LinExpr& operator*=(double s) {
    constant *= s;
    for (auto& [v, c] : terms) c *= s;
    return *this;
  }
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(LinExpr a, double s) { return a *= s; }
  friend LinExpr operator*(double s, LinExpr a) { return a *= s; }
};

struct PsdBlock {
  int index = -1;
  int size = 0;
  int first_var = -1;  // builder var id of the first svec coordinate
};

/// Incremental assembly of a standard-form conic program. Variables are
/// created as PSD blocks, nonnegative scalars or free scalars; the built
/// program orders them [psd blocks..., nonneg..., free...] regardless of
/// creation order. Row order equals insertion order.
class ProgramBuilder {
 public:
  VarRef add_free();
  std::vector<VarRef> add_free(int count);
  VarRef add_nonneg();
  PsdBlock add_psd_block(int size);

  /// svec coordinate variable of S(r, c), r >= c in the lower triangle.
  VarRef psd_var(const PsdBlock& blk, int r, int c) const;
  /// S(r, c) as an expression (undoes the sqrt(2) svec scaling).
  LinExpr psd_entry(const PsdBlock& blk, int r, int c) const;

  /// Appends the equality row `expr = rhs`; returns the row index.
  int add_row(const LinExpr& expr, double rhs);
  void add_objective(VarRef v, double coeff);
  void add_objective(const LinExpr& e, double scale = 1.0);

  int num_rows() const { return static_cast<int>(rhs_.size()); }
  int num_vars() const { return next_id_; }

  ConicProgram build();

  /// Flat column index of a variable in the built program (build() first).
  int flat_index(VarRef v) const;
  /// Flat offset of a PSD block's svec segment in the built program.
  int block_offset(const PsdBlock& blk) const { return flat_index(VarRef{blk.first_var}); }

 private:
  enum class Kind : unsigned char { Psd, Nonneg, Free };
  std::vector<Kind> kind_;
  std::vector<int> psd_block_sizes_;
  std::vector<int> psd_first_var_;
  std::vector<int> nonneg_vars_;
  std::vector<int> free_vars_;
  std::vector<std::vector<std::pair<int, double>>> rows_;
  std::vector<double> rhs_;
  std::map<int, double> objective_;
  std::vector<int> flat_;
  bool built_ = false;
  int next_id_ = 0;
};

}  // namespace roakit
