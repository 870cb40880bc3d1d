#include "nsfv/convergence.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nsfv/errors.hpp"

namespace nsfv {

State restrict_state(const Grid& fine, const State& s) {
  if (fine.n1() % 2 != 0 || fine.n2() % 2 != 0) throw ConfigError("restriction needs even grid dimensions");
  const int n1 = fine.n1() / 2;
  const int n2 = fine.n2() / 2;
  State out;
  out.t = s.t;
  const std::size_t n = static_cast<std::size_t>(n1) * n2;
  for (CellField* f : {&out.rho, &out.u.x1, &out.u.x2, &out.theta}) f->assign(n, 0.0);
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      const std::size_t c = static_cast<std::size_t>(i) + static_cast<std::size_t>(n1) * j;
      for (int dj = 0; dj < 2; ++dj) {
        for (int di = 0; di < 2; ++di) {
          const std::size_t f = fine.index(2 * i + di, 2 * j + dj);
          out.rho[c] += 0.25 * s.rho[f];
          out.u.x1[c] += 0.25 * s.u.x1[f];
          out.u.x2[c] += 0.25 * s.u.x2[f];
          out.theta[c] += 0.25 * s.theta[f];
        }
      }
    }
  }
  return out;
}

namespace {

struct Accum {
  double v[4] = {0.0, 0.0, 0.0, 0.0};
};

}  // namespace

CascadeResult run_cascade(const ExperimentConfig& cfg, const CascadeOptions& opts) {
  if (opts.levels < 2) throw ConfigError("a cascade needs at least two levels");
  if (opts.coarse_n1 % 2 != 0 || opts.coarse_n1 < 4) throw ConfigError("coarse n1 must be even and at least 4");
  if (!(opts.q >= 1.0)) throw ConfigError("q must be at least 1");
  if (!(opts.T >= 0.0)) throw ConfigError("cascade time must be nonnegative");
  if (!(opts.dt_over_h > 0.0)) throw ConfigError("dt/h must be positive");

  CascadeResult res;
  res.q = opts.q;
  res.T = opts.T;

  // Only the previous (coarser) level is kept in memory.
  std::vector<State> coarse;
  Grid coarse_grid;
  std::vector<Accum> sums;

  for (int lvl = 0; lvl < opts.levels; ++lvl) {
    ExperimentConfig c = cfg;
    c.n1 = opts.coarse_n1 << lvl;
    c.n2 = c.n1 / 2;
    const Grid g = make_grid(c);
    const double dt = opts.dt_over_h * g.h();
    const SchemeParams p = make_params(c, g, dt);
    const State init = opts.start == CascadeStart::Stationary ? stationary_state(c, g) : build_initial_state(c, g);
    CascadeLevel info{c.n1, c.n2, g.h(), dt, step_count(0.0, opts.T, dt)};
    res.levels.push_back(info);

    std::vector<State> levels;
    const bool keep = lvl + 1 < opts.levels;
    if (keep) levels.push_back(init);
    Accum acc;
    try {
      run(g, init, p, opts.solver, opts.T, [&](const StepEvent& e) {
        if (keep) levels.push_back(e.cur);
        if (lvl == 0) return;
        const State r = restrict_state(g, e.cur);
        const auto k = static_cast<std::size_t>((e.index + 1) / 2);  // right end of the coarse interval
        if (k >= coarse.size()) return;
        const State& u = coarse[k];
        const CellField* a[4] = {&r.rho, &r.u.x1, &r.u.x2, &r.theta};
        const CellField* b[4] = {&u.rho, &u.u.x1, &u.u.x2, &u.theta};
        for (int v = 0; v < 4; ++v) {
          double s = 0.0;
          for (std::size_t q = 0; q < a[v]->size(); ++q) s += std::pow(std::abs((*a[v])[q] - (*b[v])[q]), opts.q);
          acc.v[v] += dt * s * coarse_grid.cell_area();
        }
      });
    } catch (const StepError& e) {
      res.complete = false;
      std::ostringstream m;
      m << "level " << lvl << " (" << c.n1 << "x" << c.n2 << "): " << e.what();
      res.failure = m.str();
      break;
    }
    if (lvl > 0) sums.push_back(acc);
    coarse = std::move(levels);
    coarse_grid = g;
  }

  for (std::size_t k = 0; k < sums.size(); ++k) {
    CascadeDifference d;
    d.level = static_cast<int>(k);
    d.h = res.levels[k].h;
    const double iq = 1.0 / opts.q;
    d.d_rho = std::pow(sums[k].v[0], iq);
    d.d_u1 = std::pow(sums[k].v[1], iq);
    d.d_u2 = std::pow(sums[k].v[2], iq);
    d.d_theta = std::pow(sums[k].v[3], iq);
    d.d = std::pow(sums[k].v[0] + sums[k].v[1] + sums[k].v[2] + sums[k].v[3], iq);
    d.order = k == 0 ? std::numeric_limits<double>::quiet_NaN() : std::log2(res.differences[k - 1].d / d.d);
    res.differences.push_back(d);
  }
  return res;
}

}  // namespace nsfv
