#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "roakit/moments.hpp"
#include "roakit/semialgebraic.hpp"
#include "roakit/system.hpp"

namespace roakit {

class NonFinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfDomain : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExitEvent { ReachedTarget, LeftX, Timeout };
std::string to_string(ExitEvent e);

/// RK4 trajectory on a fixed grid. Grid states are exact RK4 iterates; the
/// event time and state come from linear interpolation of the straddling
/// step.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> inputs;  // filled when a controller is attached
  ExitEvent event = ExitEvent::Timeout;
  double event_time = 0.0;
  Eigen::VectorXd event_state;
};

/// Integrates dx/dt = fbar(x) from x0 until the state enters X_T, leaves
/// closure(X), or reaches the horizon. `controller` only records the applied
/// inputs along the way. Throws NonFinite on state blow-up.
Trajectory simulate(const std::vector<Polynomial>& fbar, const Eigen::VectorXd& x0, double dt,
                    double T, const ProblemSets& sets,
                    const std::vector<Polynomial>* controller = nullptr);

void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

struct LiouvilleReport {
  int test_degree = 0;
  double max_relative_residual = 0.0;
  Eigen::VectorXd row_residuals;  // absolute, per graded-lex test monomial
  double discount_tail_bound = 0.0;
  long samples = 0;
};

/// Empirical transport-identity residual: trajectory quadrature builds the
/// discounted occupation and exit measures from the sampled initial points
/// and evaluates every monomial test row. Timeout trajectories contribute
/// nothing to the exit measure; their occupation moments are truncated at T
/// with the discount tail recorded.
LiouvilleReport liouville_residual(const std::vector<Polynomial>& fbar, const ProblemSets& sets,
                                   double beta, const std::vector<Eigen::VectorXd>& x0_samples,
                                   double dt, double T, int test_degree);

struct VolumeEstimate {
  double volume = 0.0;
  double stderr_ = 0.0;
  long samples = 0;
};

/// Monte Carlo volume of {x in region : indicator(x)}; the region volume is
/// analytic for balls/boxes and bounding-box Monte Carlo otherwise.
VolumeEstimate estimate_volume(const std::function<bool(const Eigen::VectorXd&)>& indicator,
                               const SemialgebraicSet& region, long samples, std::uint64_t seed);

/// Deterministic grid volume of {x in X : indicator(x)} over the bounding
/// box of X: full grid for n <= 3, Monte Carlo above.
double grid_volume(const std::function<bool(const Eigen::VectorXd&)>& indicator,
                   const SemialgebraicSet& X, int points_per_axis);

struct InequalityCheck {
  std::string name;
  double worst = 0.0;  // most negative sampled value
  double scale = 1.0;  // 1 + max |value|
  long violations = 0;
  long samples = 0;
  bool pass = true;
};

struct CertificateCheck {
  std::vector<InequalityCheck> checks;
  double tolerance = 1e-6;
  bool pass = true;
  const InequalityCheck* worst_check() const;
};

/// Grades one inequality family from sampled values: a point fails when the
/// value drops below -tolerance*scale; the family fails when more than 0.1%
/// of samples do.
InequalityCheck check_nonneg(const std::string& name, const std::vector<double>& values,
                             double tolerance);

/// Steps along the trajectory where the discounted value e^{-beta t} v(x(t))
/// increases by more than tol*(1+|v|); zero for any certificate whose decay
/// inequality holds along the path. With a domain, only steps whose both
/// endpoints lie inside it are graded.
long gronwall_violations(const Polynomial& v, double beta, const Trajectory& tr, double tol,
                         const SemialgebraicSet* domain = nullptr);

}  // namespace roakit
