#include <algorithm>
#include <cmath>
#include <ostream>

#include "roakit/rng.hpp"
#include "roakit/verify.hpp"

namespace roakit {

std::string to_string(ExitEvent e) {
  switch (e) {
    case ExitEvent::ReachedTarget: return "ReachedTarget";
    case ExitEvent::LeftX: return "LeftX";
    case ExitEvent::Timeout: return "Timeout";
  }
  return "?";
}

namespace {

void eval_field(const std::vector<Polynomial>& fbar, const Eigen::VectorXd& x,
                Eigen::VectorXd& out) {
  const int n = static_cast<int>(fbar.size());
  for (int j = 0; j < n; ++j) out(j) = fbar[static_cast<std::size_t>(j)].evaluate(x.data(), n);
}

double min_inequality(const SemialgebraicSet& s, const Eigen::VectorXd& x) {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& g : s.inequalities) v = std::min(v, g.evaluate(x.data(), s.n));
  return v;
}

}  // namespace

Trajectory simulate(const std::vector<Polynomial>& fbar, const Eigen::VectorXd& x0, double dt,
                    double T, const ProblemSets& sets,
                    const std::vector<Polynomial>* controller) {
  if (dt <= 0.0 || T < dt) throw std::invalid_argument("simulate: need dt > 0 and T >= dt");
  const int n = static_cast<int>(fbar.size());
  Trajectory tr;
  tr.times.push_back(0.0);
  tr.states.push_back(x0);

  const auto record_inputs = [&](const Eigen::VectorXd& x) {
    if (!controller) return;
    Eigen::VectorXd u(controller->size());
    for (std::size_t i = 0; i < controller->size(); ++i) {
      u(static_cast<Eigen::Index>(i)) = (*controller)[i].evaluate(x.data(), n);
    }
    tr.inputs.push_back(std::move(u));
  };
  record_inputs(x0);

  // Immediate classification of the initial point.
  if (sets.X_T.strictly_contains(x0)) {
    tr.event = ExitEvent::ReachedTarget;
    tr.event_time = 0.0;
    tr.event_state = x0;
    return tr;
  }
  if (min_inequality(sets.X, x0) < 0.0) {
    tr.event = ExitEvent::LeftX;
    tr.event_time = 0.0;
    tr.event_state = x0;
    return tr;
  }

  Eigen::VectorXd x = x0, k1(n), k2(n), k3(n), k4(n), xm(n);
  double target_prev = min_inequality(sets.X_T, x0);
  double state_prev = min_inequality(sets.X, x0);
  const long steps = static_cast<long>(std::ceil(T / dt - 1e-12));
  for (long s = 1; s <= steps; ++s) {
    eval_field(fbar, x, k1);
    xm = x + 0.5 * dt * k1;
    eval_field(fbar, xm, k2);
    xm = x + 0.5 * dt * k2;
    eval_field(fbar, xm, k3);
    xm = x + dt * k3;
    eval_field(fbar, xm, k4);
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t = static_cast<double>(s) * dt;
    if (!x.allFinite() || x.norm() > 1e12) {
      throw NonFinite("simulate: state blew up at t = " + std::to_string(t));
    }
    tr.times.push_back(t);
    tr.states.push_back(x);
    record_inputs(x);

    const double target_now = min_inequality(sets.X_T, x);
    const double state_now = min_inequality(sets.X, x);
    if (target_now > 0.0) {
      const double denom = target_now - target_prev;
      const double frac = denom > 0.0 ? std::clamp(-target_prev / denom, 0.0, 1.0) : 1.0;
      tr.event = ExitEvent::ReachedTarget;
      tr.event_time = t - dt + frac * dt;
      tr.event_state = tr.states[tr.states.size() - 2] +
                       frac * (x - tr.states[tr.states.size() - 2]);
      return tr;
    }
    if (state_now < 0.0) {
      const double denom = state_prev - state_now;
      const double frac = denom > 0.0 ? std::clamp(state_prev / denom, 0.0, 1.0) : 1.0;
      tr.event = ExitEvent::LeftX;
      tr.event_time = t - dt + frac * dt;
      tr.event_state = tr.states[tr.states.size() - 2] +
                       frac * (x - tr.states[tr.states.size() - 2]);
      return tr;
    }
    target_prev = target_now;
    state_prev = state_now;
  }
  tr.event = ExitEvent::Timeout;
  tr.event_time = tr.times.back();
  tr.event_state = x;
  return tr;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  const int n = static_cast<int>(tr.states.empty() ? 0 : tr.states[0].size());
  const int m = static_cast<int>(tr.inputs.empty() ? 0 : tr.inputs[0].size());
  os << "t";
  for (int j = 1; j <= n; ++j) os << ",x" << j;
  for (int j = 1; j <= m; ++j) os << ",u" << j;
  os << ",event\n";
  char buf[64];
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.12g", tr.times[i]);
    os << buf;
    for (int j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof(buf), "%.12g", tr.states[i](j));
      os << "," << buf;
    }
    for (int j = 0; j < m && i < tr.inputs.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.12g", tr.inputs[i](j));
      os << "," << buf;
    }
    os << "," << (i + 1 == tr.times.size() ? to_string(tr.event) : "");
    os << "\n";
  }
}

LiouvilleReport liouville_residual(const std::vector<Polynomial>& fbar, const ProblemSets& sets,
                                   double beta, const std::vector<Eigen::VectorXd>& x0_samples,
                                   double dt, double T, int test_degree) {
  const int n = static_cast<int>(fbar.size());
  int deg_f = 0;
  for (const auto& p : fbar) deg_f = std::max(deg_f, p.degree());
  const int mu_degree = test_degree + std::max(deg_f - 1, 0);

  MomentVector y_mu(n, mu_degree), y_exit(n, test_degree), y_init(n, test_degree);
  const auto mu_basis = monomial_basis(n, mu_degree);
  const auto test_basis = monomial_basis(n, test_degree);

  const auto monomials_at = [&](const Eigen::VectorXd& x, const std::vector<MultiIndex>& basis,
                                Eigen::VectorXd& out) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      double v = 1.0;
      for (int j = 0; j < n; ++j)
        for (int e = 0; e < basis[i][j]; ++e) v *= x(j);
      out(static_cast<Eigen::Index>(i)) = v;
    }
  };

  Eigen::VectorXd mono_mu(static_cast<Eigen::Index>(mu_basis.size()));
  Eigen::VectorXd mono_prev(static_cast<Eigen::Index>(mu_basis.size()));
  Eigen::VectorXd mono_test(static_cast<Eigen::Index>(test_basis.size()));
  double tail = 0.0;

  for (const auto& x0 : x0_samples) {
    Trajectory tr = simulate(fbar, x0, dt, T, sets);
    monomials_at(x0, test_basis, mono_test);
    y_init.values += mono_test;

    // Trapezoid quadrature of e^{-beta t} x(t)^alpha over the grid, plus the
    // partial interval up to the interpolated event time.
    monomials_at(tr.states[0], mu_basis, mono_prev);
    for (std::size_t s = 1; s < tr.times.size(); ++s) {
      monomials_at(tr.states[s], mu_basis, mono_mu);
      const double w0 = std::exp(-beta * tr.times[s - 1]);
      const double w1 = std::exp(-beta * tr.times[s]);
      y_mu.values += 0.5 * (tr.times[s] - tr.times[s - 1]) * (w0 * mono_prev + w1 * mono_mu);
      mono_prev.swap(mono_mu);
    }
    if (tr.event != ExitEvent::Timeout) {
      if (tr.event_time > tr.times.back()) {
        monomials_at(tr.event_state, mu_basis, mono_mu);
        const double w0 = std::exp(-beta * tr.times.back());
        const double w1 = std::exp(-beta * tr.event_time);
        y_mu.values += 0.5 * (tr.event_time - tr.times.back()) * (w0 * mono_prev + w1 * mono_mu);
      }
      monomials_at(tr.event_state, test_basis, mono_test);
      y_exit.values += std::exp(-beta * tr.event_time) * mono_test;
    } else {
      tail = std::max(tail, std::exp(-beta * T) / beta);
    }
  }
  const double inv = 1.0 / static_cast<double>(x0_samples.size());
  y_mu.values *= inv;
  y_exit.values *= inv;
  y_init.values *= inv;

  LiouvilleReport rep;
  rep.test_degree = test_degree;
  rep.samples = static_cast<long>(x0_samples.size());
  rep.discount_tail_bound = tail;
  rep.row_residuals.resize(static_cast<Eigen::Index>(test_basis.size()));
  double worst = 0.0;
  for (std::size_t i = 0; i < test_basis.size(); ++i) {
    const Polynomial mono = Polynomial::monomial(test_basis[i], 1.0);
    const Polynomial flow = lie_derivative(mono, fbar);
    const double t_exit = y_exit.at(test_basis[i]);
    const double t_mu = beta * y_mu.at(test_basis[i]);
    const double t_init = y_init.at(test_basis[i]);
    const double t_flow = y_mu.integrate(flow);
    const double r = t_exit + t_mu - t_init - t_flow;
    rep.row_residuals(static_cast<Eigen::Index>(i)) = std::abs(r);
    const double scale = std::max({1.0, std::abs(t_exit), std::abs(t_mu), std::abs(t_init),
                                   std::abs(t_flow)});
    worst = std::max(worst, std::abs(r) / scale);
  }
  rep.max_relative_residual = worst;
  return rep;
}

VolumeEstimate estimate_volume(const std::function<bool(const Eigen::VectorXd&)>& indicator,
                               const SemialgebraicSet& region, long samples, std::uint64_t seed) {
  if (!region.box) throw std::invalid_argument("estimate_volume: region needs a bounding box");
  Rng rng(seed);
  const int n = region.n;
  Eigen::VectorXd x(n);
  long hits = 0;
  for (long s = 0; s < samples; ++s) {
    for (int j = 0; j < n; ++j) x(j) = rng.uniform(region.box->lo(j), region.box->hi(j));
    if (region.contains(x) && indicator(x)) ++hits;
  }
  const double vol_box = region.box->volume();
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  VolumeEstimate est;
  est.volume = vol_box * p;
  est.stderr_ = vol_box * std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(samples));
  est.samples = samples;
  return est;
}

double grid_volume(const std::function<bool(const Eigen::VectorXd&)>& indicator,
                   const SemialgebraicSet& X, int points_per_axis) {
  if (!X.box) throw std::invalid_argument("grid_volume: set needs a bounding box");
  const int n = X.n;
  if (n > 3) {
    return estimate_volume(indicator, X, 1'000'000, 0x9d1dULL).volume;
  }
  const Eigen::VectorXd lo = X.box->lo, hi = X.box->hi;
  const double cell = ((hi - lo) / points_per_axis).prod();
  long hits = 0;
  Eigen::VectorXd x(n);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  const long total = static_cast<long>(std::pow(points_per_axis, n));
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    for (int j = 0; j < n; ++j) {
      idx[static_cast<std::size_t>(j)] = static_cast<int>(rem % points_per_axis);
      rem /= points_per_axis;
    }
    for (int j = 0; j < n; ++j) {
      x(j) = lo(j) + (hi(j) - lo(j)) * (idx[static_cast<std::size_t>(j)] + 0.5) / points_per_axis;
    }
    if (X.contains(x) && indicator(x)) ++hits;
  }
  return cell * static_cast<double>(hits);
}

InequalityCheck check_nonneg(const std::string& name, const std::vector<double>& values,
                             double tolerance) {
  InequalityCheck chk;
  chk.name = name;
  chk.samples = static_cast<long>(values.size());
  double maxabs = 0.0, worst = std::numeric_limits<double>::infinity();
  for (double v : values) {
    maxabs = std::max(maxabs, std::abs(v));
    worst = std::min(worst, v);
  }
  chk.scale = 1.0 + maxabs;
  chk.worst = values.empty() ? 0.0 : worst;
  for (double v : values) {
    if (v < -tolerance * chk.scale) ++chk.violations;
  }
  chk.pass = chk.violations <= static_cast<long>(values.size() / 1000);
  return chk;
}

long gronwall_violations(const Polynomial& v, double beta, const Trajectory& tr, double tol,
                         const SemialgebraicSet* domain) {
  long bad = 0;
  const int n = static_cast<int>(tr.states.empty() ? 0 : tr.states[0].size());
  for (std::size_t s = 0; s + 1 < tr.states.size(); ++s) {
    if (domain && (!domain->contains(tr.states[s], 1e-12) ||
                   !domain->contains(tr.states[s + 1], 1e-12))) {
      continue;
    }
    const double v0 = v.evaluate(tr.states[s].data(), n);
    const double v1 = v.evaluate(tr.states[s + 1].data(), n);
    const double d0 = std::exp(-beta * tr.times[s]) * v0;
    const double d1 = std::exp(-beta * tr.times[s + 1]) * v1;
    if (d1 > d0 + tol * (1.0 + std::abs(v0))) ++bad;
  }
  return bad;
}

const InequalityCheck* CertificateCheck::worst_check() const {
  const InequalityCheck* w = nullptr;
  for (const auto& c : checks) {
    if (!w || c.worst / c.scale < w->worst / w->scale) w = &c;
  }
  return w;
}

}  // namespace roakit
