#include "roakit/system.hpp"

#include <cmath>
#include <stdexcept>

namespace roakit {

int ControlSystem::deg_f() const {
  int d = 0;
  for (const auto& p : f) d = std::max(d, p.degree());
  return d;
}

int ControlSystem::deg_G() const {
  int d = 0;
  for (const auto& row : G)
    for (const auto& p : row) d = std::max(d, p.degree());
  return d;
}

std::vector<Polynomial> ControlSystem::G_column(int i) const {
  std::vector<Polynomial> col;
  col.reserve(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) col.push_back(G[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)]);
  return col;
}

ControlSystem make_system(std::vector<Polynomial> f, std::vector<std::vector<Polynomial>> G,
                          SemialgebraicSet X, SemialgebraicSet X_T, const InputBox& box,
                          double beta) {
  ControlSystem sys;
  sys.n = static_cast<int>(f.size());
  sys.m = box.channels();
  if (beta <= 0.0) throw std::invalid_argument("make_system: discount beta must be positive");
  if (static_cast<int>(G.size()) != sys.n) throw DimensionMismatch("make_system: G row count");
  for (const auto& row : G) {
    if (static_cast<int>(row.size()) != sys.m) throw DimensionMismatch("make_system: G column count");
  }
  if (X.n != sys.n || X_T.n != sys.n) throw DimensionMismatch("make_system: set dimension");
  for (int i = 0; i < sys.m; ++i) {
    if (!(box.hi(i) > box.lo(i))) throw std::invalid_argument("make_system: input box needs lo < hi");
  }
  if (!X.box && !X.infer_box()) {
    throw std::invalid_argument(
        "make_system: X needs a ball or box inequality to bound its closure");
  }
  if (!X_T.box) {
    X_T.box = X.box;  // target lives inside X
    X_T.infer_box();
  }

  sys.beta = beta;
  sys.user_box = box;
  sys.u_offset = box.lo;
  sys.u_scale = Eigen::VectorXd::Ones(sys.m);

  double u_max = 0.0;
  if (sys.m > 0) {
    Eigen::VectorXd width = box.hi - box.lo;
    const bool uniform = (width.array() - width(0)).abs().maxCoeff() <= 1e-12 * width(0);
    u_max = uniform ? width(0) : 1.0;
    // Shift: drift absorbs G * lo; non-uniform widths fold into the columns.
    for (int i = 0; i < sys.m; ++i) {
      for (int r = 0; r < sys.n; ++r) {
        f[static_cast<std::size_t>(r)] += G[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] * box.lo(i);
      }
      if (!uniform) {
        sys.u_scale(i) = width(i);
        for (int r = 0; r < sys.n; ++r) {
          G[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] *= width(i);
        }
      }
    }
  }

  sys.f = std::move(f);
  sys.G = std::move(G);
  sys.sets.X = std::move(X);
  sys.sets.X_T = std::move(X_T);
  sys.sets.u_max = u_max;
  sys.sets.m = sys.m;
  return sys;
}

}  // namespace roakit
