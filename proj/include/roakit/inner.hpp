#pragma once

#include "roakit/outer.hpp"

namespace roakit {

/// Moment relaxation of the complement-ROA problem: one initial/slack
/// measure pair dominated by Lebesgue on the target complement, plus one
/// occupation/exit measure pair per discount rate, all sharing the initial
/// measure. Supports decompose piecewise over the complement and boundary
/// pieces.
struct InnerAssembly {
  ConicProgram prog;
  int n = 0, k = 0, d = 0, n_beta = 0;
  int v_degree = 0;
  std::vector<std::vector<int>> mu0, mu0_hat;           // [piece][rank]
  std::vector<std::vector<std::vector<int>>> mu;        // [beta][piece][rank]
  std::vector<std::vector<std::vector<int>>> muT;       // [beta][boundary piece][rank]
  std::vector<MultiIndex> test_monomials;
  std::vector<std::vector<int>> liouville_rows;  // per beta
  std::vector<int> domination_rows;
  MomentVector leb_XTc;
};

struct InnerCertificate {
  Polynomial w;
  std::vector<Polynomial> v;  // one per discount rate
  std::vector<double> beta_vec;
  int k = 0;
};

struct InnerResult {
  int k = 0;
  std::vector<double> beta_vec;
  double objective = 0.0;  // mass of the initial measure
  MomentVector mu0, mu0_hat;
  std::vector<MomentVector> mu, muT;  // per beta, summed over pieces
  InnerCertificate certificate;
  SolverReport report;
  CertificateCheck feasibility;
  bool certificate_resolved = false;
  ProblemSets sets;
  std::vector<Polynomial> fbar;
};

InnerAssembly assemble_inner(const std::vector<Polynomial>& fbar, const ProblemSets& sets,
                             const std::vector<double>& beta_vec, int k);

InnerResult solve_inner(const std::vector<Polynomial>& fbar, const ProblemSets& sets,
                        const std::vector<double>& beta_vec, int k,
                        const SolveOptions& opts = SolveOptions{}, std::uint64_t check_seed = 4321,
                        int check_samples = 10000);

/// Inside iff sum_i v_i(x) < 0 (strict); throws OutOfDomain outside
/// closure(X).
Membership inner_membership(const InnerResult& res, const Eigen::VectorXd& x);

CertificateCheck check_inner_certificate(const InnerCertificate& cert,
                                         const std::vector<Polynomial>& fbar,
                                         const ProblemSets& sets, int samples, std::uint64_t seed);

InnerCertificate solve_inner_sos(const std::vector<Polynomial>& fbar, const ProblemSets& sets,
                                 const std::vector<double>& beta_vec, int k,
                                 const SolveOptions& opts, SolverReport* report = nullptr);

struct InvarianceReport {
  long trajectories = 0;
  long reached_target = 0;
  long pre_exit_violations = 0;   // left the inner set before reaching X_T
  bool target_contained = false;  // closure(X_T) inside the inner set
  long full_horizon_exits = 0;    // exits over [0, T] when target_contained
  bool empty_inner = false;
  double min_margin = 0.0;  // most positive sum(v) seen along checked paths
};

/// Simulates from sampled inner-set points and reports pre-target exits of
/// the inner set, the target-containment premise, and full-horizon exits
/// when that premise holds.
InvarianceReport check_invariance(const InnerResult& res, const std::vector<Polynomial>& fbar,
                                  const ProblemSets& sets, int samples, double dt, double T,
                                  std::uint64_t seed);

}  // namespace roakit
