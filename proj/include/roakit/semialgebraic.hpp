#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "roakit/moments.hpp"
#include "roakit/polynomial.hpp"

namespace roakit {

class EmptyOrThin : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BoundingBox {
  Eigen::VectorXd lo, hi;
  double volume() const;
};

/// A set detected to be a Euclidean ball r^2 - |x - c|^2 >= 0.
struct BallShape {
  Eigen::VectorXd center;
  double radius = 0.0;
};

/// Basic semialgebraic set: {x : g >= 0 for all inequalities, h = 0 for all
/// equalities}. Closed-set semantics everywhere except point membership,
/// where `strictly_contains` uses strict inequalities.
struct SemialgebraicSet {
  int n = 0;
  std::vector<Polynomial> inequalities;
  std::vector<Polynomial> equalities;
  /// Bounding box of the closure, required for sampling and Monte Carlo
  /// moments. Inferred from ball/box-shaped inequalities when possible.
  std::optional<BoundingBox> box;

  static SemialgebraicSet ball(const Eigen::VectorXd& center, double radius);
  static SemialgebraicSet cube(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
  bool strictly_contains(const Eigen::VectorXd& x) const;
  int max_degree() const;

  /// Attach a bounding box inferred from the inequalities (ball or axis
  /// bounds); returns false when nothing usable was found.
  bool infer_box();
  /// Ball detection on a single inequality list entry.
  static std::optional<BallShape> detect_ball(const Polynomial& g);

  std::vector<std::string> to_strings() const;
  static SemialgebraicSet from_strings(const std::vector<std::string>& lines, int n);
};

/// State/target pair with the input bound; the internal input box is
/// [0, u_max]^m.
struct ProblemSets {
  SemialgebraicSet X;
  SemialgebraicSet X_T;
  double u_max = 0.0;
  int m = 0;
};

/// Pieces of closure(X) \ X_T: one per target inequality g, each
/// {-g >= 0} together with all of X's inequalities.
std::vector<SemialgebraicSet> complement_pieces(const SemialgebraicSet& X,
                                                const SemialgebraicSet& X_T);

/// Pieces of the boundary of X: piece i carries equality g_i = 0 and the
/// remaining inequalities g_j >= 0.
std::vector<SemialgebraicSet> boundary_pieces(const SemialgebraicSet& X);

MomentVector lebesgue_moments_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int d);
MomentVector lebesgue_moments_ball(const Eigen::VectorXd& center, double r, int d);

struct MonteCarloMeta {
  long samples = 0;
  std::uint64_t seed = 0;
  double box_volume = 0.0;
  double acceptance = 0.0;
};

/// Monte Carlo moments over a general set using bounding-box rejection.
MomentVector monte_carlo_moments(const SemialgebraicSet& set, int d, long samples,
                                 std::uint64_t seed, MonteCarloMeta* meta = nullptr);

/// Lebesgue moments of a full-dimensional set: analytic for balls and boxes,
/// Monte Carlo fallback otherwise (meta records the sampling parameters).
MomentVector lebesgue_moments(const SemialgebraicSet& set, int d, MonteCarloMeta* meta = nullptr);

/// Rejection sampling inside the bounding box; equality constraints are
/// handled by root projection along random rays. Deterministic per seed.
/// Throws EmptyOrThin when the acceptance rate stays below 1e-6 after 1e7
/// proposals.
std::vector<Eigen::VectorXd> sample_set(const SemialgebraicSet& set, int count,
                                        std::uint64_t seed);

}  // namespace roakit
