#include "roakit/semialgebraic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roakit/rng.hpp"

namespace roakit {

double BoundingBox::volume() const {
  double v = 1.0;
  for (Eigen::Index j = 0; j < lo.size(); ++j) v *= hi(j) - lo(j);
  return v;
}

SemialgebraicSet SemialgebraicSet::ball(const Eigen::VectorXd& center, double radius) {
  const int n = static_cast<int>(center.size());
  Polynomial g = Polynomial::constant(n, radius * radius - center.squaredNorm());
  for (int j = 0; j < n; ++j) {
    g.add_term(MultiIndex::unit(n, j), 2.0 * center(j));
    std::vector<int> e(static_cast<std::size_t>(n), 0);
    e[static_cast<std::size_t>(j)] = 2;
    g.add_term(MultiIndex(e), -1.0);
  }
  SemialgebraicSet s;
  s.n = n;
  s.inequalities.push_back(g);
  s.box = BoundingBox{(center.array() - radius).matrix(), (center.array() + radius).matrix()};
  return s;
}

SemialgebraicSet SemialgebraicSet::cube(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  const int n = static_cast<int>(lo.size());
  SemialgebraicSet s;
  s.n = n;
  for (int j = 0; j < n; ++j) {
    s.inequalities.push_back(Polynomial::variable(n, j) - Polynomial::constant(n, lo(j)));
    s.inequalities.push_back(Polynomial::constant(n, hi(j)) - Polynomial::variable(n, j));
  }
  s.box = BoundingBox{lo, hi};
  return s;
}

bool SemialgebraicSet::contains(const Eigen::VectorXd& x, double tol) const {
  for (const auto& g : inequalities) {
    if (g.evaluate(x.data(), n) < -tol) return false;
  }
  const double eqtol = std::max(tol, 1e-9);
  for (const auto& h : equalities) {
    if (std::abs(h.evaluate(x.data(), n)) > eqtol) return false;
  }
  return true;
}

bool SemialgebraicSet::strictly_contains(const Eigen::VectorXd& x) const {
  if (!equalities.empty()) return false;
  for (const auto& g : inequalities) {
    if (g.evaluate(x.data(), n) <= 0.0) return false;
  }
  return true;
}

int SemialgebraicSet::max_degree() const {
  int d = 0;
  for (const auto& g : inequalities) d = std::max(d, g.degree());
  for (const auto& h : equalities) d = std::max(d, h.degree());
  return d;
}

std::optional<BallShape> SemialgebraicSet::detect_ball(const Polynomial& g) {
  const int n = g.dim();
  if (g.degree() != 2) return std::nullopt;
  // Quadratic part must be -a * I with a > 0, no cross terms.
  double a = 0.0;
  Eigen::VectorXd lin = Eigen::VectorXd::Zero(n);
  double cst = 0.0;
  for (const auto& [idx, c] : g.terms()) {
    if (idx.degree() == 0) {
      cst = c;
    } else if (idx.degree() == 1) {
      for (int j = 0; j < n; ++j) {
        if (idx[j] == 1) lin(j) = c;
      }
    } else {
      int sq = -1;
      for (int j = 0; j < n; ++j) {
        if (idx[j] == 2 && sq < 0) {
          sq = j;
        } else if (idx[j] != 0) {
          return std::nullopt;  // cross term
        }
      }
      if (c >= 0.0) return std::nullopt;
      if (a == 0.0) {
        a = -c;
      } else if (std::abs(-c - a) > 1e-12 * a) {
        return std::nullopt;  // anisotropic
      }
    }
  }
  if (a <= 0.0) return std::nullopt;
  // Every coordinate needs the square term present.
  int squares = 0;
  for (const auto& [idx, c] : g.terms()) {
    if (idx.degree() == 2) ++squares;
  }
  if (squares != n) return std::nullopt;
  BallShape b;
  b.center = lin / (2.0 * a);
  const double r2 = cst / a + b.center.squaredNorm();
  if (r2 <= 0.0) return std::nullopt;
  b.radius = std::sqrt(r2);
  return b;
}

bool SemialgebraicSet::infer_box() {
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  for (const auto& g : inequalities) {
    if (auto ball = detect_ball(g)) {
      lo = lo.cwiseMax((ball->center.array() - ball->radius).matrix());
      hi = hi.cwiseMin((ball->center.array() + ball->radius).matrix());
      continue;
    }
    if (g.degree() == 1) {
      // b + w x_j >= 0 acting on a single coordinate.
      int var = -1;
      double w = 0.0, b = 0.0;
      bool single = true;
      for (const auto& [idx, c] : g.terms()) {
        if (idx.degree() == 0) {
          b = c;
        } else {
          for (int j = 0; j < n; ++j) {
            if (idx[j] == 1) {
              if (var >= 0 && var != j) single = false;
              var = j;
              w = c;
            }
          }
        }
      }
      if (single && var >= 0 && w != 0.0) {
        if (w > 0.0)
          lo(var) = std::max(lo(var), -b / w);
        else
          hi(var) = std::min(hi(var), -b / w);
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(lo(j)) || !std::isfinite(hi(j))) return false;
  }
  box = BoundingBox{lo, hi};
  return true;
}

std::vector<SemialgebraicSet> complement_pieces(const SemialgebraicSet& X,
                                                const SemialgebraicSet& X_T) {
  std::vector<SemialgebraicSet> pieces;
  for (const auto& g : X_T.inequalities) {
    SemialgebraicSet piece;
    piece.n = X.n;
    piece.inequalities.push_back(-Polynomial(g));
    for (const auto& gx : X.inequalities) piece.inequalities.push_back(gx);
    piece.equalities = X.equalities;
    piece.box = X.box;
    pieces.push_back(std::move(piece));
  }
  return pieces;
}

std::vector<SemialgebraicSet> boundary_pieces(const SemialgebraicSet& X) {
  std::vector<SemialgebraicSet> pieces;
  for (std::size_t i = 0; i < X.inequalities.size(); ++i) {
    SemialgebraicSet piece;
    piece.n = X.n;
    piece.equalities.push_back(X.inequalities[i]);
    for (std::size_t j = 0; j < X.inequalities.size(); ++j) {
      if (j != i) piece.inequalities.push_back(X.inequalities[j]);
    }
    piece.box = X.box;
    pieces.push_back(std::move(piece));
  }
  return pieces;
}

MomentVector lebesgue_moments_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int d) {
  const int n = static_cast<int>(lo.size());
  for (int j = 0; j < n; ++j) {
    if (!(lo(j) < hi(j))) throw std::invalid_argument("lebesgue_moments_box: need lo < hi");
  }
  MomentVector y(n, d);
  const auto basis = monomial_basis(n, d);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double v = 1.0;
    for (int j = 0; j < n; ++j) {
      const int a = basis[i][j];
      v *= (std::pow(hi(j), a + 1) - std::pow(lo(j), a + 1)) / (a + 1);
    }
    y.values(static_cast<Eigen::Index>(i)) = v;
  }
  return y;
}

namespace {

// Monomial moment over the centered unit ball; zero when any exponent is odd.
double unit_ball_moment(int n, const MultiIndex& a) {
  for (int j = 0; j < n; ++j) {
    if (a[j] % 2 != 0) return 0.0;
  }
  double lg = 0.0;
  for (int j = 0; j < n; ++j) lg += std::lgamma((a[j] + 1) / 2.0);
  lg -= std::lgamma((n + a.degree()) / 2.0 + 1.0);
  return std::exp(lg);
}

}  // namespace

MomentVector lebesgue_moments_ball(const Eigen::VectorXd& center, double r, int d) {
  if (r <= 0.0) throw std::invalid_argument("lebesgue_moments_ball: radius must be positive");
  const int n = static_cast<int>(center.size());
  MomentVector y(n, d);
  const auto basis = monomial_basis(n, d);
  const bool centered = center.isZero(0.0);
  std::vector<double> c(center.data(), center.data() + n);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const MultiIndex& a = basis[i];
    double v;
    if (centered) {
      v = unit_ball_moment(n, a) * std::pow(r, n + a.degree());
    } else {
      // integral over B(c,r) of x^a = integral over B(0,r) of (u+c)^a.
      const Polynomial shifted = shift(Polynomial::monomial(a, 1.0), c);
      v = 0.0;
      for (const auto& [b, cb] : shifted.terms()) {
        v += cb * unit_ball_moment(n, b) * std::pow(r, n + b.degree());
      }
    }
    y.values(static_cast<Eigen::Index>(i)) = v;
  }
  return y;
}

MomentVector monte_carlo_moments(const SemialgebraicSet& set, int d, long samples,
                                 std::uint64_t seed, MonteCarloMeta* meta) {
  if (!set.box) throw std::invalid_argument("monte_carlo_moments: set needs a bounding box");
  const int n = set.n;
  Rng rng(seed);
  const auto basis = monomial_basis(n, d);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  Eigen::VectorXd x(n);
  std::vector<std::vector<double>> powers(static_cast<std::size_t>(n),
                                          std::vector<double>(static_cast<std::size_t>(d + 1), 1.0));
  long hits = 0;
  for (long s = 0; s < samples; ++s) {
    for (int j = 0; j < n; ++j) x(j) = rng.uniform(set.box->lo(j), set.box->hi(j));
    if (!set.contains(x)) continue;
    ++hits;
    for (int j = 0; j < n; ++j) {
      for (int e = 1; e <= d; ++e) powers[static_cast<std::size_t>(j)][static_cast<std::size_t>(e)] =
          powers[static_cast<std::size_t>(j)][static_cast<std::size_t>(e - 1)] * x(j);
    }
    for (std::size_t i = 0; i < basis.size(); ++i) {
      double m = 1.0;
      for (int j = 0; j < n; ++j) m *= powers[static_cast<std::size_t>(j)][static_cast<std::size_t>(basis[i][j])];
      acc(static_cast<Eigen::Index>(i)) += m;
    }
  }
  const double boxvol = set.box->volume();
  MomentVector y(n, d);
  y.values = acc * (boxvol / static_cast<double>(samples));
  if (meta) {
    meta->samples = samples;
    meta->seed = seed;
    meta->box_volume = boxvol;
    meta->acceptance = static_cast<double>(hits) / static_cast<double>(samples);
  }
  return y;
}

MomentVector lebesgue_moments(const SemialgebraicSet& set, int d, MonteCarloMeta* meta) {
  if (set.equalities.empty() && set.inequalities.size() == 1) {
    if (auto ball = SemialgebraicSet::detect_ball(set.inequalities[0])) {
      return lebesgue_moments_ball(ball->center, ball->radius, d);
    }
  }
  if (set.equalities.empty() && set.box &&
      set.inequalities.size() == static_cast<std::size_t>(2 * set.n)) {
    // Axis-aligned box given by its 2n face inequalities.
    bool is_box = true;
    for (const auto& g : set.inequalities) {
      if (g.degree() != 1) is_box = false;
    }
    if (is_box) return lebesgue_moments_box(set.box->lo, set.box->hi, d);
  }
  return monte_carlo_moments(set, d, 4'000'000, 0x5eedf00dULL, meta);
}

std::vector<Eigen::VectorXd> sample_set(const SemialgebraicSet& set, int count,
                                        std::uint64_t seed) {
  if (!set.box) throw std::invalid_argument("sample_set: set needs a bounding box");
  if (set.equalities.size() > 1) {
    throw std::invalid_argument("sample_set: at most one equality supported");
  }
  const int n = set.n;
  Rng rng(seed);
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(static_cast<std::size_t>(count));
  const long max_proposals = 10'000'000;
  long proposals = 0;
  Eigen::VectorXd x(n), dir(n);
  const double diam = (set.box->hi - set.box->lo).norm();
  while (static_cast<int>(pts.size()) < count && proposals < max_proposals) {
    ++proposals;
    for (int j = 0; j < n; ++j) x(j) = rng.uniform(set.box->lo(j), set.box->hi(j));
    if (set.equalities.empty()) {
      bool ok = true;
      for (const auto& g : set.inequalities) {
        if (g.evaluate(x.data(), n) < 0.0) {
          ok = false;
          break;
        }
      }
      if (ok) pts.push_back(x);
      continue;
    }
    // Root projection along a random ray for the single equality.
    const Polynomial& h = set.equalities[0];
    for (int j = 0; j < n; ++j) dir(j) = rng.normal();
    const double dn = dir.norm();
    if (dn == 0.0) continue;
    dir /= dn;
    const int scan = 64;
    double prev_t = -diam;
    double prev_v = h.evaluate((x + prev_t * dir).eval().data(), n);
    double root_lo = 0.0, root_hi = 0.0;
    bool bracket = false;
    for (int s = 1; s <= scan; ++s) {
      const double t = -diam + 2.0 * diam * s / scan;
      const double v = h.evaluate((x + t * dir).eval().data(), n);
      if (prev_v == 0.0 || prev_v * v < 0.0) {
        root_lo = prev_t;
        root_hi = t;
        bracket = true;
        break;
      }
      prev_t = t;
      prev_v = v;
    }
    if (!bracket) continue;
    double flo = h.evaluate((x + root_lo * dir).eval().data(), n);
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (root_lo + root_hi);
      const double fm = h.evaluate((x + mid * dir).eval().data(), n);
      if (flo * fm <= 0.0) {
        root_hi = mid;
      } else {
        root_lo = mid;
        flo = fm;
      }
    }
    Eigen::VectorXd p = x + 0.5 * (root_lo + root_hi) * dir;
    if (std::abs(h.evaluate(p.data(), n)) > 1e-9) continue;
    bool ok = true;
    for (const auto& g : set.inequalities) {
      if (g.evaluate(p.data(), n) < 0.0) {
        ok = false;
        break;
      }
    }
    if (ok) pts.push_back(std::move(p));
  }
  if (static_cast<int>(pts.size()) < count) {
    const double rate = static_cast<double>(pts.size()) / static_cast<double>(proposals);
    if (rate < 1e-6) {
      throw EmptyOrThin("sample_set: acceptance rate below 1e-6; set is likely empty or thin");
    }
  }
  return pts;
}

std::vector<std::string> SemialgebraicSet::to_strings() const {
  std::vector<std::string> out;
  for (const auto& g : inequalities) out.push_back(g.to_string() + " >= 0");
  for (const auto& h : equalities) out.push_back(h.to_string() + " == 0");
  return out;
}

SemialgebraicSet SemialgebraicSet::from_strings(const std::vector<std::string>& lines, int n) {
  SemialgebraicSet s;
  s.n = n;
  for (const auto& line : lines) {
    const auto ge = line.rfind(">=");
    const auto eq = line.rfind("==");
    if (ge != std::string::npos) {
      s.inequalities.push_back(Polynomial::parse(line.substr(0, ge), n));
    } else if (eq != std::string::npos) {
      s.equalities.push_back(Polynomial::parse(line.substr(0, eq), n));
    } else {
      throw std::invalid_argument("set constraint needs a '>= 0' or '== 0' marker: " + line);
    }
  }
  s.infer_box();
  return s;
}

}  // namespace roakit
