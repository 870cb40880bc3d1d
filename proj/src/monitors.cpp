#include "nsfv/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nsfv/errors.hpp"
#include "nsfv/operators.hpp"
#include "nsfv/thermo.hpp"

namespace nsfv {

namespace {

double sum(const CellField& f) {
  double s = 0.0;
  for (double v : f) s += v;
  return s;
}

// Viscous stress S = 2 mu D + lambda div I (no pressure) and grad_h u.
struct Strain {
  TensorField grad;
  TensorField stress;
};

Strain strain(const Grid& g, const VectorField& u, const SchemeParams& p) {
  const Wall ns = Wall::no_slip();
  Strain out{grad_cell(g, u, ns), sym_grad(g, u, ns)};
  const CellField div = div_cell(g, u, ns);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    for (int k = 0; k < 2; ++k) {
      for (int a = 0; a < 2; ++a) {
        out.stress(k, a)[c] = 2.0 * p.mu * out.stress(k, a)[c] + (k == a ? p.lambda * div[c] : 0.0);
      }
    }
  }
  return out;
}

double contract(const TensorField& a, const TensorField& b, std::size_t c) {
  return a.c11[c] * b.c11[c] + a.c12[c] * b.c12[c] + a.c21[c] * b.c21[c] + a.c22[c] * b.c22[c];
}

}  // namespace

void HypothesisBReport::add(const State& s) {
  for (std::size_t c = 0; c < s.cells(); ++c) {
    rho_min = std::min(rho_min, s.rho[c]);
    rho_max = std::max(rho_max, s.rho[c]);
    theta_min = std::min(theta_min, s.theta[c]);
    theta_max = std::max(theta_max, s.theta[c]);
    speed_max = std::max(speed_max, std::hypot(s.u.x1[c], s.u.x2[c]));
  }
  ++samples;
}

void HypothesisBReport::merge(const HypothesisBReport& o) {
  rho_min = std::min(rho_min, o.rho_min);
  rho_max = std::max(rho_max, o.rho_max);
  theta_min = std::min(theta_min, o.theta_min);
  theta_max = std::max(theta_max, o.theta_max);
  speed_max = std::max(speed_max, o.speed_max);
  samples += o.samples;
}

HypothesisBReport check_hypothesis_B(const Trajectory& traj, std::size_t first, std::size_t last) {
  if (first > last || last >= traj.size()) throw RangeError("hypothesis B window is empty or out of range");
  HypothesisBReport r;
  for (std::size_t k = first; k <= last; ++k) r.add(traj.at(k));
  return r;
}

double mass_total(const Grid& g, const State& s) { return sum(s.rho) * g.cell_area(); }

double energy_budget_residual(const Grid& g, const State& prev, const State& cand, const SchemeParams& p) {
  const double h2 = g.cell_area();
  double change = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c) {
    change += cand.rho[c] * cand.theta[c] - prev.rho[c] * prev.theta[c];
  }
  change *= p.law.cv() / p.dt * h2;

  double wall = 0.0;
  const int top = g.n2() - 1;
  for (int i = 0; i < g.n1(); ++i) {
    const auto col = static_cast<std::size_t>(i);
    wall += cand.theta[g.index(i, 0)] - p.closure.theta_bottom[col];
    wall += cand.theta[g.index(i, top)] - p.closure.theta_top[col];
  }
  wall *= 2.0 * p.kappa;  // 2 (kappa/h) * h per wall face

  const Strain st = strain(g, cand.u, p);
  double work = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const double pr = cand.rho[c] * cand.theta[c];
    const double div = st.grad.c11[c] + st.grad.c22[c];
    work += contract(st.stress, st.grad, c) - pr * div;
  }
  work *= h2;
  return std::abs(change + wall - work);
}

double entropy_production(const Grid& g, const State& s, const SchemeParams& p) {
  const Strain st = strain(g, s.u, p);
  double viscous = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c) viscous += contract(st.stress, st.grad, c) / s.theta[c];
  viscous *= g.cell_area();

  // Interior faces only: the face weight 1/(theta_in theta_out) needs two genuine temperatures.
  double heat = 0.0;
  for (int j = 0; j < g.n2(); ++j) {
    for (int i = 0; i < g.n1(); ++i) {
      const double t = s.theta[g.index(i, j)];
      const double e = s.theta[g.index(g.wrap(i + 1), j)];
      heat += (e - t) * (e - t) / (t * e);
      if (j + 1 < g.n2()) {
        const double n = s.theta[g.index(i, j + 1)];
        heat += (n - t) * (n - t) / (t * n);
      }
    }
  }
  return viscous + p.kappa * heat;
}

ThetaExtension affine_extension(const Grid& g, const BoundaryClosure& c) {
  const double L = g.L();
  const double H = g.H();
  const double h = g.h();
  const int n1 = g.n1();
  std::vector<double> bottom = c.theta_bottom;
  std::vector<double> top = c.theta_top;
  return [=](double x1, double x2) {
    int i = static_cast<int>(std::floor((x1 + L) / h));
    i = ((i % n1) + n1) % n1;
    const double w = (x2 + H) / (2.0 * H);
    return (1.0 - w) * bottom[static_cast<std::size_t>(i)] + w * top[static_cast<std::size_t>(i)];
  };
}

CellField sample_extension(const Grid& g, const BoundaryClosure& c, const ThetaExtension& theta) {
  for (int i = 0; i < g.n1(); ++i) {
    const auto col = static_cast<std::size_t>(i);
    const double b = theta(g.x1(i), -g.H());
    const double t = theta(g.x1(i), g.H());
    if (std::abs(b - c.theta_bottom[col]) > 1e-10 * std::max(1.0, std::abs(c.theta_bottom[col])) ||
        std::abs(t - c.theta_top[col]) > 1e-10 * std::max(1.0, std::abs(c.theta_top[col]))) {
      std::ostringstream m;
      m << "Theta extension misses the wall temperature in column " << i;
      throw ConfigError(m.str());
    }
  }
  CellField out(g.cells());
  for (int j = 0; j < g.n2(); ++j) {
    for (int i = 0; i < g.n1(); ++i) {
      const double v = theta(g.x1(i), g.x2(j));
      if (!(v > 0.0)) throw ConfigError("Theta extension must be positive");
      out[g.index(i, j)] = v;
    }
  }
  return out;
}

CellField ballistic_density(const State& s, const CellField& Theta, const GasLaw& law) {
  CellField out(s.cells());
  for (std::size_t c = 0; c < s.cells(); ++c) {
    out[c] = ballistic_energy(s.rho[c], s.u.x1[c], s.u.x2[c], s.theta[c], Theta[c], law);
  }
  return out;
}

double ballistic_total(const Grid& g, const State& s, const CellField& Theta, const GasLaw& law) {
  return sum(ballistic_density(s, Theta, law)) * g.cell_area();
}

double renormalized_density_decay(const Grid& g, const State& prev, const State& cand, const SchemeParams& p) {
  const CellField div = div_cell(g, cand.u, Wall::no_slip());
  double db = 0.0;
  double pressure_like = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c) {
    db += cand.rho[c] * std::log(cand.rho[c]) - prev.rho[c] * std::log(prev.rho[c]);
    pressure_like += cand.rho[c] * div[c];
  }
  return (db / p.dt + pressure_like) * g.cell_area();
}

double renormalized_decay_scale(const Grid& g, const State& prev, const State& cand, double dt) {
  double rmax = 0.0;
  double lmax = 0.0;
  for (const State* s : {&prev, &cand}) {
    for (double r : s->rho) {
      rmax = std::max(rmax, r);
      lmax = std::max(lmax, std::abs(std::log(r)));
    }
  }
  // Guard the rho = 1 case where log vanishes identically.
  return g.area() * rmax * std::max(lmax, 1.0) / dt;
}

BoundWindowAccumulator::BoundWindowAccumulator(const Grid& g, const SchemeParams& p, double T) : g_(g), p_(p) {
  w_.T = T;
}

void BoundWindowAccumulator::add(const State& prev, const State& cur) {
  const double tol = 1e-9 * p_.dt;
  if (!(cur.t > w_.T + tol) || cur.t > w_.T + 1.0 + tol) return;
  const double dt = p_.dt;
  const double h = g_.h();
  const double h2 = g_.cell_area();

  const FaceField gt = grad_face(g_, cur.theta, Wall::dirichlet(p_.closure));
  double gtheta = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (double v : gt[a]) gtheta += v * v;
  }
  const TensorField gu = grad_cell(g_, cur.u, Wall::no_slip());
  double gvel = 0.0;
  double rate = 0.0;
  for (std::size_t c = 0; c < g_.cells(); ++c) {
    gvel += gu.c11[c] * gu.c11[c] + gu.c12[c] * gu.c12[c] + gu.c21[c] * gu.c21[c] + gu.c22[c] * gu.c22[c];
    const double d[4] = {cur.rho[c] - prev.rho[c], cur.u.x1[c] - prev.u.x1[c], cur.u.x2[c] - prev.u.x2[c],
                         cur.theta[c] - prev.theta[c]};
    for (double v : d) rate += v * v;
  }
  rate /= dt * dt;

  const double ha = std::pow(h, p_.alpha);
  double jumps = 0.0;
  auto face = [&](std::size_t a, std::size_t b, int axis) {
    const double un = 0.5 * (axis == 0 ? cur.u.x1[a] + cur.u.x1[b] : cur.u.x2[a] + cur.u.x2[b]);
    const double d[4] = {cur.rho[b] - cur.rho[a], cur.u.x1[b] - cur.u.x1[a], cur.u.x2[b] - cur.u.x2[a],
                         cur.theta[b] - cur.theta[a]};
    double s = 0.0;
    for (double v : d) s += v * v;
    jumps += (ha + std::abs(un)) * s;
  };
  for (int j = 0; j < g_.n2(); ++j) {
    for (int i = 0; i < g_.n1(); ++i) {
      face(g_.index(i, j), g_.index(g_.wrap(i + 1), j), 0);
      if (j + 1 < g_.n2()) face(g_.index(i, j), g_.index(i, j + 1), 1);
    }
  }

  w_.grad_theta_L2 += dt * gtheta * h2;
  w_.grad_u_L2 += dt * gvel * h2;
  w_.dt_weighted_Dt_L2 += dt * dt * rate * h2;
  w_.jump_dissipation += dt * jumps * h;
  ++w_.levels;
}

BoundWindow uniform_bound_window(const Grid& g, const Trajectory& traj, const SchemeParams& p, double T) {
  if (T < traj.t0() - 1e-9 * traj.dt() || T + 1.0 > traj.t_end() + 1e-9 * traj.dt()) {
    std::ostringstream m;
    m << "window [" << T << ", " << T + 1.0 << "] is not covered by [" << traj.t0() << ", " << traj.t_end() << "]";
    throw RangeError(m.str());
  }
  BoundWindowAccumulator acc(g, p, T);
  for (std::size_t k = 1; k < traj.size(); ++k) acc.add(traj.at(k - 1), traj.at(k));
  return acc.window();
}

Monitor::Monitor(const Grid& g, const SchemeParams& p, const State& initial)
    : g_(g), p_(p), Theta_(sample_extension(g, p.closure, affine_extension(g, p.closure))),
      mass0_(mass_total(g, initial)) {}

Monitor::Monitor(const Grid& g, const SchemeParams& p, double initial_mass)
    : g_(g), p_(p), Theta_(sample_extension(g, p.closure, affine_extension(g, p.closure))), mass0_(initial_mass) {}

StepMonitors Monitor::evaluate(const State& prev, const State& cur) const {
  StepMonitors m;
  m.mass = mass_total(g_, cur);
  m.mass_drift = std::abs(m.mass - mass0_) / mass0_;
  m.budget = energy_budget_residual(g_, prev, cur, p_);
  m.sigma = entropy_production(g_, cur, p_);
  m.ballistic = ballistic_total(g_, cur, Theta_, p_.law);
  m.decay = renormalized_density_decay(g_, prev, cur, p_);
  m.decay_scale = renormalized_decay_scale(g_, prev, cur, p_.dt);
  m.range.add(cur);
  return m;
}

}  // namespace nsfv
