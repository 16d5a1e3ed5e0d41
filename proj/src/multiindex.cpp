#include "roakit/multiindex.hpp"

#include <numeric>
#include <stdexcept>

namespace roakit {

MultiIndex::MultiIndex(std::vector<int> exponents) : exp_(std::move(exponents)) {
  if (exp_.empty()) throw std::invalid_argument("MultiIndex: empty exponent tuple");
  for (int e : exp_) {
    if (e < 0) throw std::invalid_argument("MultiIndex: negative exponent");
    degree_ += e;
  }
}

MultiIndex MultiIndex::zero(int n) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(n), 0)); }

MultiIndex MultiIndex::unit(int n, int j) {
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  e[static_cast<std::size_t>(j)] = 1;
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::plus(const MultiIndex& other) const {
  std::vector<int> e(exp_);
  for (std::size_t j = 0; j < e.size(); ++j) e[j] += other.exp_[j];
  return MultiIndex(std::move(e));
}

bool MultiIndex::try_minus(const MultiIndex& other, MultiIndex& out) const {
  std::vector<int> e(exp_);
  for (std::size_t j = 0; j < e.size(); ++j) {
    e[j] -= other.exp_[j];
    if (e[j] < 0) return false;
  }
  out = MultiIndex(std::move(e));
  return true;
}

bool operator<(const MultiIndex& a, const MultiIndex& b) {
  if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
  // Within a degree: lex with the first variable heaviest, larger exponent first.
  for (std::size_t j = 0; j < a.exp_.size(); ++j) {
    if (a.exp_[j] != b.exp_[j]) return a.exp_[j] > b.exp_[j];
  }
  return false;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

std::size_t basis_size(int n, int d) {
  return static_cast<std::size_t>(binomial(n + d, n));
}

namespace {

void enumerate_degree(int n, int total, std::vector<int>& cur, std::vector<MultiIndex>& out) {
  if (n == 1) {
    cur.push_back(total);
    out.emplace_back(cur);
    cur.pop_back();
    return;
  }
  for (int a = total; a >= 0; --a) {
    cur.push_back(a);
    enumerate_degree(n - 1, total - a, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<MultiIndex> monomial_basis(int n, int d) {
  if (n < 1 || d < 0) throw std::invalid_argument("monomial_basis: need n >= 1, d >= 0");
  std::vector<MultiIndex> out;
  out.reserve(basis_size(n, d));
  std::vector<int> cur;
  for (int t = 0; t <= d; ++t) enumerate_degree(n, t, cur, out);
  return out;
}

std::size_t rank_of(const MultiIndex& a) {
  const int n = a.dim();
  const int t = a.degree();
  // Indices of strictly smaller degree.
  std::size_t rank = (t == 0) ? 0 : static_cast<std::size_t>(binomial(n + t - 1, n));
  // Position inside the degree-t block: tuples with a larger leading exponent
  // come first, then recurse on the tail.
  int rem = t;
  for (int j = 0; j < n - 1; ++j) {
    const int nj = n - 1 - j;  // variables after j
    for (int v = rem; v > a[j]; --v) {
      rank += static_cast<std::size_t>(binomial(rem - v + nj - 1, nj - 1));
    }
    rem -= a[j];
  }
  return rank;
}

MultiIndex index_of_rank(int n, std::size_t rank) {
  int t = 0;
  while (static_cast<std::size_t>(binomial(n + t, n)) <= rank) ++t;
  std::size_t pos = rank - (t == 0 ? 0 : static_cast<std::size_t>(binomial(n + t - 1, n)));
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  int rem = t;
  for (int j = 0; j < n - 1; ++j) {
    const int nj = n - 1 - j;
    for (int v = rem; v >= 0; --v) {
      const std::size_t cnt = static_cast<std::size_t>(binomial(rem - v + nj - 1, nj - 1));
      if (pos < cnt) {
        e[static_cast<std::size_t>(j)] = v;
        rem -= v;
        break;
      }
      pos -= cnt;
    }
  }
  e[static_cast<std::size_t>(n - 1)] = rem;
  return MultiIndex(std::move(e));
}

}  // namespace roakit
