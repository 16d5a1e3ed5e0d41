#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace roakit {

class NotSymmetric : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Product cone in variable order [psd blocks..., nonnegatives, frees].
/// PSD blocks are packed in scaled lower-triangular column-major form
/// (off-diagonal entries carry a factor sqrt(2)), which keeps the cone
/// self-dual under the Euclidean inner product.
struct Cone {
  std::vector<int> psd_sizes;
  int nonneg = 0;
  int free_count = 0;

  int psd_dim() const {
    int s = 0;
    for (int k : psd_sizes) s += k * (k + 1) / 2;
    return s;
  }
  int dim() const { return psd_dim() + nonneg + free_count; }
};

inline int svec_len(int s) { return s * (s + 1) / 2; }
void svec_pack(const Eigen::MatrixXd& S, double* out);
void svec_unpack(const double* v, int s, Eigen::MatrixXd& S);

enum class SolveStatus { Optimal, Infeasible, Unbounded, SlowProgress };
std::string to_string(SolveStatus s);

/// Standard-form program: minimize c'x subject to A x = b, x in cone.
struct ConicProgram {
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;
  Eigen::VectorXd b, c;
  Cone cone;

  void validate() const;
  /// Sparse text dump, one entry per line:
  ///   CONIC 1 <m> <N>
  ///   PSD <size>          (repeated, in cone order)
  ///   NONNEG <count>
  ///   FREE <count>
  ///   C <col> <val> / B <row> <val> / A <row> <col> <val>
  void dump(std::ostream& os) const;
  static ConicProgram load(std::istream& is);
};

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

struct ConicSolution {
  Eigen::VectorXd x;  // primal point in the cone
  Eigen::VectorXd y;  // equality multipliers
  Eigen::VectorXd z;  // dual slack in the dual cone
  SolveStatus status = SolveStatus::SlowProgress;
  Residuals residuals;
  long iterations = 0;
  double objective_primal = 0.0;
  double objective_dual = 0.0;
  /// Improving ray: primal infeasibility certificate (a y with A'y in -K*,
  /// b'y = 1) or unboundedness certificate (an x in K with Ax ~ 0, c'x = -1).
  Eigen::VectorXd certificate;
};

struct SolveOptions {
  double tol = 1e-8;
  long max_iter = 200000;
  double relaxation = 1.5;
  int check_interval = 25;
  int ruiz_iters = 10;
  /// Declare unboundedness when near-primal-feasible iterates drive the
  /// objective below -unbounded_objective while the duality gap diverges.
  double unbounded_objective = 1e5;
  /// Safeguarded Anderson acceleration of the splitting map; 0 disables.
  int anderson_memory = 10;
  int anderson_interval = 10;
  double anderson_safeguard = 0.95;
  /// Weight of the rhs against the objective in the embedding; moment-form
  /// programs converge far faster with the rhs emphasized.
  double b_weight = 10.0;
  bool verbose = false;
};

/// Homogeneous self-dual embedding solved by projective operator splitting.
/// Deterministic: fixed iteration order, no timing-dependent branches.
ConicSolution solve(const ConicProgram& prog, const SolveOptions& opts = SolveOptions{});
ConicSolution solve(const ConicProgram& prog, double tol, long max_iter);

/// Nearest (Frobenius) positive semidefinite matrix: eigendecompose, clamp
/// negative eigenvalues, reassemble. Throws NotSymmetric when the input is
/// not symmetric within 1e-12 relative.
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& S);

}  // namespace roakit
