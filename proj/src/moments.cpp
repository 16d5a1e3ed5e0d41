#include "roakit/moments.hpp"

#include <stdexcept>

namespace roakit {

double MomentVector::integrate(const Polynomial& p) const {
  if (p.dim() != n) throw DimensionMismatch("MomentVector::integrate: dimension mismatch");
  if (p.degree() > d) throw std::invalid_argument("MomentVector::integrate: degree shortfall");
  double s = 0.0;
  for (const auto& [a, c] : p.terms()) s += c * at(a);
  return s;
}

Eigen::MatrixXd moment_matrix(const MomentVector& y, int k) {
  return localizing_matrix(y, Polynomial::constant(y.n, 1.0), k);
}

Eigen::MatrixXd localizing_matrix(const MomentVector& y, const Polynomial& g, int k) {
  if (g.dim() != y.n) throw DimensionMismatch("localizing_matrix: dimension mismatch");
  if (y.d < 2 * k + g.degree()) {
    throw std::invalid_argument("localizing_matrix: moment degree shortfall");
  }
  const auto basis = monomial_basis(y.n, k);
  const auto L = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd M(L, L);
  for (Eigen::Index r = 0; r < L; ++r) {
    for (Eigen::Index c = r; c < L; ++c) {
      const MultiIndex ab = basis[static_cast<std::size_t>(r)].plus(basis[static_cast<std::size_t>(c)]);
      double s = 0.0;
      for (const auto& [gamma, cg] : g.terms()) s += cg * y.at(ab.plus(gamma));
      M(r, c) = s;
      M(c, r) = s;
    }
  }
  return M;
}

}  // namespace roakit
