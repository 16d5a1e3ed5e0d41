#pragma once

#include "roakit/outer.hpp"

namespace roakit {

class DegenerateMoments : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProjectionInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Provenance { Raw, Projected };
std::string to_string(Provenance p);

/// Polynomial feedback in the internal input coordinates [0, u_max]^m.
struct Controller {
  std::vector<Polynomial> components;
  int degree = 0;
  Provenance provenance = Provenance::Raw;
  int k = 0;
  double u_max = 0.0;
  std::string nu_description;
  std::vector<double> moment_residuals;  // ||M u - sigma||_2 per channel
};

/// Least-squares moment matching: for each channel, the coefficient vector
/// minimizing ||M u - sigma||_2 over degree-deg_u polynomials, where M is
/// the left block of the occupation moment matrix and sigma the input
/// measure's moments. Solved by truncated SVD (relative cutoff 1e-9).
Controller extract_raw(const OuterResult& res, int deg_u);

/// L2(nu) projection onto the input-feasible polynomials: minimizes the
/// moment-weighted distance to `raw` subject to u and u_max - u admitting
/// weighted-SOS decompositions over X. deg_s < 0 picks the smallest
/// multiplier degree covering deg_u; l1_gamma > 0 adds a sparsity term on
/// the coefficients.
Controller project_controller(const Controller& raw, const MomentVector& nu,
                              const ProblemSets& sets, int deg_s = -1, double l1_gamma = 0.0,
                              const SolveOptions& opts = SolveOptions{});

/// f + G*u. Refuses Raw controllers (input bounds unverified) unless forced.
std::vector<Polynomial> closed_loop(const ControlSystem& sys, const Controller& u,
                                    bool force_raw = false);

/// Controller in user input coordinates: u_offset + u_scale .* u_internal.
std::vector<Polynomial> user_controller(const ControlSystem& sys, const Controller& u);

/// ||M u - sigma||_2 of a controller against the moments of a solved
/// relaxation (monotonicity diagnostics: projection trades fidelity for
/// feasibility).
std::vector<double> moment_residuals(const OuterResult& res, const Controller& u);

}  // namespace roakit
