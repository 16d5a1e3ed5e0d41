#pragma once

#include <Eigen/Dense>
#include <vector>

#include "roakit/polynomial.hpp"
#include "roakit/semialgebraic.hpp"

namespace roakit {

/// User-facing input box, one [lo, hi] interval per channel.
struct InputBox {
  Eigen::VectorXd lo, hi;
  int channels() const { return static_cast<int>(lo.size()); }
};

/// Input-affine system dx/dt = f(x) + G(x) u with the inputs already mapped
/// to the internal box [0, u_max]^m. `u_offset`/`u_scale` recover the user
/// inputs as u_user = u_offset + u_scale .* u_internal.
struct ControlSystem {
  int n = 0;
  int m = 0;
  std::vector<Polynomial> f;               // drift, internal coordinates
  std::vector<std::vector<Polynomial>> G;  // n rows x m columns
  ProblemSets sets;
  double beta = 1.0;

  InputBox user_box;
  Eigen::VectorXd u_offset;
  Eigen::VectorXd u_scale;

  int deg_f() const;
  int deg_G() const;  // 0 when m == 0
  /// Column i of G as a field over x.
  std::vector<Polynomial> G_column(int i) const;
};

/// Builds the internal system from user data: shifts the drift by G*lo and,
/// when channel widths differ, rescales the columns so a single u_max fits
/// every channel (uniform widths keep u_max = width).
ControlSystem make_system(std::vector<Polynomial> f, std::vector<std::vector<Polynomial>> G,
                          SemialgebraicSet X, SemialgebraicSet X_T, const InputBox& box,
                          double beta);

}  // namespace roakit
