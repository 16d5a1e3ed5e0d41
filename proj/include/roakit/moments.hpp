#pragma once

#include <Eigen/Dense>

#include "roakit/multiindex.hpp"
#include "roakit/polynomial.hpp"

namespace roakit {

/// Truncated moment sequence y_alpha of a measure, indexed by graded-lex rank
/// over all |alpha| <= d.
struct MomentVector {
  int n = 0;
  int d = 0;
  Eigen::VectorXd values;

  MomentVector() = default;
  MomentVector(int n, int d) : n(n), d(d), values(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis_size(n, d)))) {}

  double at(const MultiIndex& a) const { return values(static_cast<Eigen::Index>(rank_of(a))); }
  double& at(const MultiIndex& a) { return values(static_cast<Eigen::Index>(rank_of(a))); }
  double mass() const { return values(0); }

  /// Integral of p against the measure: sum of coeff * y_alpha.
  double integrate(const Polynomial& p) const;
};

/// Moment matrix over the degree-k monomial basis: entry (a, b) = y_{a+b}.
/// Requires y.d >= 2k.
Eigen::MatrixXd moment_matrix(const MomentVector& y, int k);

/// Localizing matrix of g over the degree-k basis: entry (a, b) =
/// sum_gamma g_gamma * y_{a+b+gamma}. Requires y.d >= 2k + deg(g).
/// With g = 1 this is the moment matrix.
Eigen::MatrixXd localizing_matrix(const MomentVector& y, const Polynomial& g, int k);

}  // namespace roakit
