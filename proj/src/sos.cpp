#include "roakit/sos.hpp"

#include <cmath>
#include <stdexcept>

namespace roakit {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

AffinePoly AffinePoly::from(const Polynomial& p) {
  AffinePoly a(p.dim());
  for (const auto& [idx, c] : p.terms()) a.coeffs_[idx] = LinExpr(c);
  return a;
}

AffinePoly AffinePoly::unknown(int n, int deg, ProgramBuilder& builder,
                               std::vector<VarRef>* coeff_vars) {
  AffinePoly a(n);
  const auto basis = monomial_basis(n, deg);
  auto vars = builder.add_free(static_cast<int>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) a.coeffs_[basis[i]] = LinExpr(vars[i]);
  if (coeff_vars) *coeff_vars = std::move(vars);
  return a;
}

void AffinePoly::add(const MultiIndex& a, const LinExpr& e) {
  auto [it, inserted] = coeffs_.emplace(a, e);
  if (!inserted) it->second += e;
}

AffinePoly& AffinePoly::operator+=(const AffinePoly& o) {
  for (const auto& [idx, e] : o.coeffs_) add(idx, e);
  return *this;
}

AffinePoly& AffinePoly::operator-=(const AffinePoly& o) {
  for (const auto& [idx, e] : o.coeffs_) add(idx, LinExpr(e) *= -1.0);
  return *this;
}

AffinePoly& AffinePoly::operator*=(double s) {
  for (auto& [idx, e] : coeffs_) e *= s;
  return *this;
}

AffinePoly AffinePoly::derivative(int j) const {
  AffinePoly r(n_);
  for (const auto& [a, e] : coeffs_) {
    if (a[j] == 0) continue;
    std::vector<int> exp = a.exponents();
    const int aj = exp[static_cast<std::size_t>(j)];
    exp[static_cast<std::size_t>(j)] = aj - 1;
    r.add(MultiIndex(std::move(exp)), LinExpr(e) *= static_cast<double>(aj));
  }
  return r;
}

AffinePoly AffinePoly::multiplied_by(const Polynomial& q) const {
  if (q.dim() != n_) throw DimensionMismatch("AffinePoly: dimension mismatch in multiply");
  AffinePoly r(n_);
  for (const auto& [a, e] : coeffs_) {
    for (const auto& [b, cb] : q.terms()) {
      r.add(a.plus(b), LinExpr(e) *= cb);
    }
  }
  return r;
}

AffinePoly AffinePoly::lie(const std::vector<Polynomial>& field) const {
  if (static_cast<int>(field.size()) != n_) {
    throw DimensionMismatch("AffinePoly::lie: field dimension mismatch");
  }
  AffinePoly r(n_);
  for (int j = 0; j < n_; ++j) r += derivative(j).multiplied_by(field[static_cast<std::size_t>(j)]);
  return r;
}

MeasureBlockInfo compile_measure_block(ProgramBuilder& builder, const std::vector<VarRef>& y,
                                       const SemialgebraicSet& set, int d) {
  const int n = set.n;
  if (y.size() != basis_size(n, d)) {
    throw std::invalid_argument("compile_measure_block: moment vector length mismatch");
  }
  if (d < set.max_degree()) {
    throw std::invalid_argument("compile_measure_block: degree below set polynomials");
  }
  MeasureBlockInfo info;

  std::vector<Polynomial> multipliers;
  multipliers.push_back(Polynomial::constant(n, 1.0));
  for (const auto& g : set.inequalities) multipliers.push_back(g);

  for (const auto& g : multipliers) {
    const int k = (d - g.degree()) / 2;
    const auto basis = monomial_basis(n, k);
    const int L = static_cast<int>(basis.size());
    PsdBlock blk = builder.add_psd_block(L);
    for (int c = 0; c < L; ++c) {
      for (int r = c; r < L; ++r) {
        LinExpr expr = builder.psd_entry(blk, r, c);
        const MultiIndex rc = basis[static_cast<std::size_t>(r)].plus(basis[static_cast<std::size_t>(c)]);
        for (const auto& [gamma, cg] : g.terms()) {
          expr -= LinExpr(y[rank_of(rc.plus(gamma))], cg);
        }
        builder.add_row(expr, 0.0);
      }
    }
    info.blocks.push_back({g, k, blk});
  }

  for (const auto& h : set.equalities) {
    const int k = (d - h.degree()) / 2;
    const auto basis = monomial_basis(n, k);
    const int L = static_cast<int>(basis.size());
    std::vector<int> rows;
    for (int c = 0; c < L; ++c) {
      for (int r = c; r < L; ++r) {
        LinExpr expr;
        const MultiIndex rc = basis[static_cast<std::size_t>(r)].plus(basis[static_cast<std::size_t>(c)]);
        for (const auto& [gamma, ch] : h.terms()) {
          expr += LinExpr(y[rank_of(rc.plus(gamma))], ch);
        }
        rows.push_back(builder.add_row(expr, 0.0));
      }
    }
    info.equality_rows.push_back(std::move(rows));
  }
  return info;
}

std::vector<SosPiece> pieces_for(const SemialgebraicSet& set) {
  std::vector<SosPiece> pieces;
  for (const auto& g : set.inequalities) pieces.push_back({g, false});
  for (const auto& h : set.equalities) pieces.push_back({h, true});
  return pieces;
}

SosConstraintInfo compile_sos_constraint(ProgramBuilder& builder, const AffinePoly& target,
                                         const std::vector<SosPiece>& pieces, int d) {
  const int n = target.dim();
  for (const auto& [a, e] : target.coeffs()) {
    if (a.degree() > d) throw std::invalid_argument("compile_sos_constraint: target exceeds degree budget");
  }
  for (const auto& p : pieces) {
    if (p.g.degree() > d) throw std::invalid_argument("compile_sos_constraint: piece exceeds degree budget");
  }

  SosConstraintInfo info;
  // Row expression accumulator indexed by graded-lex rank over degree <= d.
  const auto rows_basis = monomial_basis(n, d);
  std::vector<LinExpr> acc(rows_basis.size());
  for (const auto& [a, e] : target.coeffs()) acc[rank_of(a)] += e;

  const auto add_gram = [&](const Polynomial& g) {
    const int k = (d - g.degree()) / 2;
    const auto basis = monomial_basis(n, k);
    const int L = static_cast<int>(basis.size());
    PsdBlock blk = builder.add_psd_block(L);
    for (int c = 0; c < L; ++c) {
      for (int r = c; r < L; ++r) {
        const MultiIndex rc = basis[static_cast<std::size_t>(r)].plus(basis[static_cast<std::size_t>(c)]);
        const double w = (r == c) ? 1.0 : kSqrt2;  // svec var already carries sqrt2
        for (const auto& [gamma, cg] : g.terms()) {
          acc[rank_of(rc.plus(gamma))] -= LinExpr(builder.psd_var(blk, r, c), w * cg);
        }
      }
    }
    return MeasureBlockInfo::Block{g, k, blk};
  };

  info.gram0 = add_gram(Polynomial::constant(n, 1.0)).psd;
  for (const auto& p : pieces) {
    if (p.free_multiplier) {
      const int hdeg = d - p.g.degree();
      const auto basis = monomial_basis(n, hdeg);
      auto vars = builder.add_free(static_cast<int>(basis.size()));
      for (std::size_t i = 0; i < basis.size(); ++i) {
        for (const auto& [gamma, cg] : p.g.terms()) {
          acc[rank_of(basis[i].plus(gamma))] -= LinExpr(vars[i], cg);
        }
      }
      info.free_multiplier_coeffs.push_back(std::move(vars));
    } else {
      info.multiplier_blocks.push_back(add_gram(p.g));
    }
  }

  info.rows.reserve(acc.size());
  info.row_monomials = rows_basis;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    info.rows.push_back(builder.add_row(acc[i], 0.0));
  }
  return info;
}

}  // namespace roakit
