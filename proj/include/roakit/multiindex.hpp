#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace roakit {

/// Exponent tuple of a monomial x1^a1 * ... * xn^an.
///
/// Ordering is graded lexicographic: lower total degree first, ties broken
/// by lexicographic comparison with x1 heaviest (so x1 precedes x2).
/// This order is fixed globally; moment vectors, matrix bases and file
/// formats all index monomials by their graded-lex rank.
class MultiIndex {
 public:
  explicit MultiIndex(std::vector<int> exponents);
  static MultiIndex zero(int n);
  static MultiIndex unit(int n, int j);

  int dim() const { return static_cast<int>(exp_.size()); }
  int degree() const { return degree_; }
  int operator[](int j) const { return exp_[static_cast<std::size_t>(j)]; }
  const std::vector<int>& exponents() const { return exp_; }

  MultiIndex plus(const MultiIndex& other) const;
  /// Componentwise difference; returns false if any component would go negative.
  bool try_minus(const MultiIndex& other, MultiIndex& out) const;

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    return a.exp_ == b.exp_;
  }
  friend bool operator!=(const MultiIndex& a, const MultiIndex& b) {
    return !(a == b);
  }
  friend bool operator<(const MultiIndex& a, const MultiIndex& b);

 private:
  std::vector<int> exp_;
  int degree_ = 0;
};

/// C(n+d, n), the number of n-variate monomials of total degree <= d.
std::size_t basis_size(int n, int d);

/// All multi-indices of total degree <= d in graded-lex order.
std::vector<MultiIndex> monomial_basis(int n, int d);

/// Graded-lex rank of a multi-index (0 for the constant monomial).
/// Inverse of index_of_rank for every degree bound covering the index.
std::size_t rank_of(const MultiIndex& a);

/// Multi-index with the given graded-lex rank in dimension n.
MultiIndex index_of_rank(int n, std::size_t rank);

/// Exact binomial coefficient in 64 bits (valid for the sizes used here).
std::uint64_t binomial(int n, int k);

}  // namespace roakit
