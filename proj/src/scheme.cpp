#include "nsfv/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nsfv/kernels.hpp"
#include "nsfv/operators.hpp"

namespace nsfv {

std::vector<std::string> SchemeParams::validate(const Grid& grid) const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!(mu > 0.0)) fail("mu must be positive");
  if (!(eta() >= 0.0)) fail("bulk viscosity eta = lambda + mu must be nonnegative");
  if (!(2.0 * mu + lambda > 0.0)) fail("2 mu + lambda must be positive");
  if (!(kappa > 0.0)) fail("kappa must be positive");
  if (!(law.gamma > 1.0)) fail("gamma must exceed 1");
  check_alpha(alpha);
  if (!(dt > 0.0)) fail("dt must be positive");
  if (!std::isfinite(g)) fail("g must be finite");
  const auto n1 = static_cast<std::size_t>(grid.n1());
  if (closure.theta_bottom.size() != n1 || closure.theta_top.size() != n1) {
    fail("wall temperature traces must have one value per column");
  }
  for (double v : closure.theta_bottom) {
    if (!(v > 0.0)) fail("wall temperature must be positive");
  }
  for (double v : closure.theta_top) {
    if (!(v > 0.0)) fail("wall temperature must be positive");
  }
  std::vector<std::string> warnings;
  const double ratio = dt / grid.h();
  if (ratio < 0.1 || ratio > 2.0) {
    std::ostringstream m;
    m << "dt/h = " << ratio << " is outside [0.1, 2]";
    warnings.push_back(m.str());
  }
  return warnings;
}

void SolverOptions::validate() const {
  if (!(newton_tol > 0.0)) throw ConfigError("newton_tol must be positive");
  if (max_newton < 1) throw ConfigError("max_newton must be at least 1");
  if (!(damping > 0.0 && damping < 1.0)) throw ConfigError("damping must lie in (0, 1)");
  if (max_halvings < 0) throw ConfigError("max_halvings must be nonnegative");
}

Residual residual_reference(const Grid& g, const State& prev, const State& cand, const SchemeParams& p) {
  const std::size_t n = g.cells();
  const double cv = p.law.cv();
  const Wall ns = Wall::no_slip();

  const TensorField grad_u = grad_cell(g, cand.u, ns);
  const CellField div_u = div_cell(g, cand.u, ns);
  const TensorField d_u = sym_grad(g, cand.u, ns);
  TensorField t = TensorField::zeros(g);
  for (std::size_t c = 0; c < n; ++c) {
    const double pr = cand.rho[c] * cand.theta[c];
    for (int k = 0; k < 2; ++k) {
      for (int a = 0; a < 2; ++a) {
        t(k, a)[c] = 2.0 * p.mu * d_u(k, a)[c] + (k == a ? p.lambda * div_u[c] - pr : 0.0);
      }
    }
  }
  const VectorField div_t = div_cell(g, t, Wall::copy());
  const CellField lap = laplacian(g, cand.theta, Wall::dirichlet(p.closure));

  CellField m1(n), m2(n), et(n);
  for (std::size_t c = 0; c < n; ++c) {
    m1[c] = cand.rho[c] * cand.u.x1[c];
    m2[c] = cand.rho[c] * cand.u.x2[c];
    et[c] = cand.rho[c] * cand.theta[c];
  }
  const CellField f_rho = div_faces(g, diffusive_upwind_flux(g, cand.rho, cand.u, p.alpha));
  const CellField f_m1 = div_faces(g, diffusive_upwind_flux(g, m1, cand.u, p.alpha));
  const CellField f_m2 = div_faces(g, diffusive_upwind_flux(g, m2, cand.u, p.alpha));
  const CellField f_e = div_faces(g, diffusive_upwind_flux(g, et, cand.u, p.alpha));

  Residual out;
  out.values.resize(kVars * n);
  for (std::size_t c = 0; c < n; ++c) {
    double work = 0.0;
    for (int k = 0; k < 2; ++k) {
      for (int a = 0; a < 2; ++a) work += t(k, a)[c] * grad_u(k, a)[c];
    }
    const double r0 = cand.rho[c];
    const double q0 = prev.rho[c];
    out.values[kVars * c + kRho] = (r0 - q0) / p.dt + f_rho[c];
    out.values[kVars * c + kU1] = (m1[c] - q0 * prev.u.x1[c]) / p.dt + f_m1[c] - div_t.x1[c];
    out.values[kVars * c + kU2] = (m2[c] - q0 * prev.u.x2[c]) / p.dt + f_m2[c] - div_t.x2[c] - r0 * p.g;
    out.values[kVars * c + kTheta] =
        cv * ((et[c] - q0 * prev.theta[c]) / p.dt + f_e[c]) - p.kappa * lap[c] - work;
    if (!(r0 > 0.0) || !(cand.theta[c] > 0.0)) out.positive = false;
  }
  return out;
}

Residual residual(const Grid& g, const State& prev, const State& cand, const SchemeParams& p) {
  StepKernels k(g);
  std::vector<double> x0(kVars * g.cells()), x(kVars * g.cells());
  pack(prev, x0);
  pack(cand, x);
  Residual out;
  out.values.resize(x.size());
  out.positive = k.residual(p, x0, x, out.values);
  return out;
}

struct Stepper::Impl {
  StepKernels kernels;
  BlockMatrix jac;
  BlockIlu0 ilu;
  DirectSolver direct;
  KrylovWorkspace krylov;
  bool use_direct;
  std::vector<double> x0, x, xt, r, rt, dx, rhs;

  Impl(const Grid& g, bool direct_solver)
      : kernels(g), jac(kernels.make_pattern()), use_direct(direct_solver) {
    const std::size_t n = kVars * g.cells();
    for (auto* v : {&x0, &x, &xt, &r, &rt, &dx, &rhs}) v->assign(n, 0.0);
  }
};

Stepper::Stepper(const Grid& g, SchemeParams p, SolverOptions opts)
    : grid_(g), params_(std::move(p)), opts_(opts) {
  params_.validate(grid_);
  opts_.validate();
  const bool direct = opts_.linear == LinearSolverKind::Direct ||
                      (opts_.linear == LinearSolverKind::Auto && grid_.cells() <= opts_.direct_max_cells);
  impl_ = std::make_unique<Impl>(grid_, direct);
}

Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

namespace {

bool above_floor(const std::vector<double>& x, double floor) {
  for (std::size_t c = 0; c < x.size(); c += kVars) {
    if (!(x[c + kRho] > floor) || !(x[c + kTheta] > floor)) return false;
  }
  return true;
}

}  // namespace

State Stepper::solve(const State& prev, double dt, double t_new) {
  Impl& w = *impl_;
  SchemeParams p = params_;
  p.dt = dt;
  pack(prev, w.x0);
  w.x = w.x0;
  w.kernels.residual(p, w.x0, w.x, w.r);
  double rn = norm_inf(w.r);
  double merit = norm2(w.r);
  const std::size_t cells = grid_.cells();

  for (int it = 0;; ++it) {
    stats_.residual = rn;
    if (rn <= opts_.newton_tol) break;
    if (it == opts_.max_newton) {
      std::ostringstream m;
      m << "Newton did not converge in " << opts_.max_newton << " iterations (max |R| = " << rn << ")";
      throw StepError(m.str(), unpack(w.x, t_new), rn, it);
    }
    ++stats_.newton_iterations;
    w.kernels.jacobian(p, w.x, w.jac);
    for (std::size_t q = 0; q < w.r.size(); ++q) w.rhs[q] = -w.r[q];
    std::fill(w.dx.begin(), w.dx.end(), 0.0);
    if (w.use_direct) {
      if (!w.direct.factor(w.jac)) throw StepError("singular Jacobian", unpack(w.x, t_new), rn, it);
      w.direct.solve(w.rhs, w.dx);
    } else {
      // The preconditioner is rebuilt once per step and kept while it still works.
      if (it == 0) w.ilu.factor(w.jac);
      KrylovResult kr = gmres(w.jac, w.ilu, w.rhs, w.dx, opts_.krylov, w.krylov);
      stats_.linear_iterations += kr.iterations;
      if (!kr.converged && it > 0) {
        w.ilu.factor(w.jac);
        std::fill(w.dx.begin(), w.dx.end(), 0.0);
        kr = gmres(w.jac, w.ilu, w.rhs, w.dx, opts_.krylov, w.krylov);
        stats_.linear_iterations += kr.iterations;
      }
    }
    // Make the linearized mass balance exact so that every iterate keeps the total mass.
    double sum_r = 0.0;
    double sum_d = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      sum_r += w.r[kVars * c];
      sum_d += w.dx[kVars * c];
    }
    const double corr = (-dt * sum_r - sum_d) / static_cast<double>(cells);
    for (std::size_t c = 0; c < cells; ++c) w.dx[kVars * c] += corr;

    double theta = 1.0;
    bool accepted = false;
    while (theta > 1e-8) {
      for (std::size_t q = 0; q < w.x.size(); ++q) w.xt[q] = w.x[q] + theta * w.dx[q];
      if (above_floor(w.xt, opts_.positivity_floor)) {
        w.kernels.residual(p, w.x0, w.xt, w.rt);
        const double mt = norm2(w.rt);
        if (mt <= (1.0 - 1e-4 * theta) * merit) {
          accepted = true;
          merit = mt;
          break;
        }
      }
      theta *= opts_.damping;
      ++stats_.backtracks;
    }
    if (!accepted) {
      std::ostringstream m;
      m << "line search failed (max |R| = " << rn << ")";
      throw StepError(m.str(), unpack(w.x, t_new), rn, it);
    }
    std::swap(w.x, w.xt);
    std::swap(w.r, w.rt);
    rn = norm_inf(w.r);
  }
  return unpack(w.x, t_new);
}

State Stepper::step(const State& prev) {
  stats_ = StepStats{};
  return solve(prev, params_.dt, prev.t + params_.dt);
}

State Stepper::advance(const State& prev) {
  try {
    return step(prev);
  } catch (const StepError&) {
    if (opts_.max_halvings == 0) throw;
  }
  for (int m = 1;; ++m) {
    const int parts = 1 << m;
    const double sub = params_.dt / parts;
    stats_ = StepStats{};
    stats_.substeps = parts;
    try {
      State s = prev;
      for (int q = 1; q <= parts; ++q) s = solve(s, sub, prev.t + q * sub);
      s.t = prev.t + params_.dt;
      return s;
    } catch (const StepError&) {
      if (m >= opts_.max_halvings) throw;
    }
  }
}

State step(const Grid& g, const State& prev, const SchemeParams& p, const SolverOptions& opts) {
  Stepper s(g, p, opts);
  return s.step(prev);
}

long long step_count(double t0, double t_end, double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (t_end < t0) throw ConfigError("t_end precedes the initial time");
  return static_cast<long long>(std::ceil((t_end - t0) / dt - 1e-9));
}

State run(const Grid& g, const State& init, const SchemeParams& p, const SolverOptions& opts, double t_end,
          const StepObserver& observer) {
  const long long n = step_count(init.t, t_end, p.dt);
  if (n == 0) return init;
  Stepper stepper(g, p, opts);
  State prev = init;
  for (long long k = 1; k <= n; ++k) {
    State cur = stepper.advance(prev);
    cur.t = init.t + static_cast<double>(k) * p.dt;
    if (observer) observer(StepEvent{k, prev, cur, stepper.last_stats()});
    prev = std::move(cur);
  }
  return prev;
}

Trajectory::Trajectory(State initial, double dt) : t0_(initial.t), dt_(dt) {
  if (!(dt > 0.0)) throw ConfigError("trajectory: dt must be positive");
  levels_.push_back(std::move(initial));
}

void Trajectory::push(State s) {
  const double expected = time(levels_.size());
  if (std::abs(s.t - expected) > 1e-9 * dt_) {
    std::ostringstream m;
    m.precision(17);
    m << "trajectory: level time " << s.t << " is off the grid point " << expected;
    throw ConfigError(m.str());
  }
  if (s.cells() != levels_.front().cells()) throw ConfigError("trajectory: grid size changed");
  levels_.push_back(std::move(s));
}

std::size_t Trajectory::interval(double t, bool allow_t0) const {
  const double s = (t - t0_) / dt_;
  const double last = static_cast<double>(levels_.size() - 1);
  if (!(s >= -1e-9) || !(s <= last + 1e-9)) {
    std::ostringstream m;
    m << "time " << t << " is outside [" << t0_ << ", " << t_end() << "]";
    throw RangeError(m.str());
  }
  const double near = std::round(s);
  double k = std::abs(s - near) <= 1e-9 ? near : std::ceil(s);
  k = std::clamp(k, 0.0, last);
  if (k == 0.0 && !allow_t0) throw RangeError("no difference quotient at the initial time");
  return static_cast<std::size_t>(k);
}

namespace {

State blend(const State& a, const State& b, double wa, double wb, double t) {
  State out = a;
  out.t = t;
  for (std::size_t c = 0; c < a.cells(); ++c) {
    out.rho[c] = wa * a.rho[c] + wb * b.rho[c];
    out.u.x1[c] = wa * a.u.x1[c] + wb * b.u.x1[c];
    out.u.x2[c] = wa * a.u.x2[c] + wb * b.u.x2[c];
    out.theta[c] = wa * a.theta[c] + wb * b.theta[c];
  }
  return out;
}

}  // namespace

State Trajectory::interpolate_pc(double t) const {
  State s = levels_[interval(t, true)];
  s.t = t;
  return s;
}

State Trajectory::interpolate_pl(double t) const {
  const std::size_t k = interval(t, true);
  const double s = (t - t0_) / dt_;
  if (k == 0 || std::abs(s - static_cast<double>(k)) <= 1e-9) {
    State out = levels_[k];
    out.t = t;
    return out;
  }
  const double theta = s - static_cast<double>(k - 1);
  return blend(levels_[k - 1], levels_[k], 1.0 - theta, theta, t);
}

State Trajectory::discrete_time_derivative(double t) const {
  const std::size_t k = interval(t, false);
  return blend(levels_[k - 1], levels_[k], -1.0 / dt_, 1.0 / dt_, t);
}

Trajectory run_recorded(const Grid& g, const State& init, const SchemeParams& p, const SolverOptions& opts,
                        double t_end) {
  Trajectory traj(init, p.dt);
  run(g, init, p, opts, t_end, [&](const StepEvent& e) { traj.push(e.cur); });
  return traj;
}

}  // namespace nsfv
