#pragma once

#include <cstdint>

#include "roakit/builder.hpp"
#include "roakit/sos.hpp"
#include "roakit/system.hpp"
#include "roakit/verify.hpp"

namespace roakit {

class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, SolveStatus status, Residuals residuals)
      : std::runtime_error(what), status(status), residuals(residuals) {}
  SolveStatus status;
  Residuals residuals;
};

class CertificateRejected : public std::runtime_error {
 public:
  CertificateRejected(const std::string& what, double worst) : std::runtime_error(what), worst(worst) {}
  double worst;
};

struct SolverReport {
  SolveStatus status = SolveStatus::SlowProgress;
  Residuals residuals;
  long iterations = 0;
  double objective_primal = 0.0;
  double objective_dual = 0.0;
};

/// Assembled moment relaxation: variables are truncated moments of the
/// occupation, exit and input measures plus their support blocks; rows are
/// the transport identity per test monomial and the input-box coupling.
struct OuterAssembly {
  ConicProgram prog;
  int n = 0, m = 0, k = 0, d = 0;
  int v_degree = 0;  // test-function degree cap
  std::vector<int> mu, muT1, muT2;                // flat moment-variable indices
  std::vector<std::vector<int>> sigma, sigma_hat;  // per input channel
  std::vector<MultiIndex> test_monomials;
  std::vector<int> liouville_rows;
  std::vector<std::vector<int>> box_rows;  // per channel, per moment rank
  MomentVector leb_X;
};

struct OuterCertificate {
  Polynomial v;
  std::vector<Polynomial> p;
  double beta = 1.0;
  int k = 0;
};

struct OuterResult {
  int k = 0;
  double beta = 1.0;
  double objective = 0.0;
  MomentVector mu, muT1, muT2;
  std::vector<MomentVector> sigma, sigma_hat;
  OuterCertificate certificate;
  SolverReport report;
  CertificateCheck feasibility;
  bool certificate_resolved = false;  // explicit SOS form used after rejection
  ProblemSets sets;
};

OuterAssembly assemble_outer(const ControlSystem& sys, int k);

/// Solves the order-k relaxation, decodes the multiplier certificate and
/// enforces sampled feasibility; when the decoded pair fails, re-solves the
/// explicit SOS form and uses that certificate instead. Throws
/// CertificateRejected when both fail, SolverFailure on a non-optimal solve.
OuterResult solve_outer(const ControlSystem& sys, int k, const SolveOptions& opts = SolveOptions{},
                        std::uint64_t check_seed = 1234, int check_samples = 10000);

enum class Membership { Inside, Outside };

/// Inside iff v(x) > 0; throws OutOfDomain for x outside closure(X).
Membership outer_membership(const OuterResult& res, const Eigen::VectorXd& x);

CertificateCheck check_outer_certificate(const OuterCertificate& cert, const ControlSystem& sys,
                                         int samples, std::uint64_t seed);

/// Direct SOS solve of the dual inequalities (used as the rejection
/// fallback; also exercised by tests on its own).
OuterCertificate solve_outer_sos(const ControlSystem& sys, int k, const SolveOptions& opts,
                                 SolverReport* report = nullptr);

}  // namespace roakit
