#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "nsfv/experiments.hpp"
#include "nsfv/scheme.hpp"

using namespace nsfv;

namespace {

constexpr double kPi = 3.14159265358979323846;

double total(const CellField& f) { return std::accumulate(f.begin(), f.end(), 0.0); }

SchemeParams uniform_params(const Grid& g, double theta) {
  SchemeParams p;
  p.dt = 0.5 * g.h();
  p.g = 0.0;
  p.closure = {std::vector<double>(g.n1(), theta), std::vector<double>(g.n1(), theta)};
  return p;
}

State uniform_state(const Grid& g, double rho, double theta) {
  State s = State::zeros(g);
  std::fill(s.rho.begin(), s.rho.end(), rho);
  std::fill(s.theta.begin(), s.theta.end(), theta);
  return s;
}

// Mirror-symmetric about x1 = 0: rho, theta even, u1 odd, u2 even.
State mirror_state(const Grid& g) {
  State s = State::zeros(g);
  for (int j = 0; j < g.n2(); ++j) {
    for (int i = 0; i < g.n1(); ++i) {
      const double x = g.x1(i), y = g.x2(j);
      const std::size_t c = g.index(i, j);
      s.rho[c] = 1.2 + 0.2 * std::cos(kPi * x / 2) * std::cos(kPi * y / 2);
      s.u.x1[c] = 0.1 * std::sin(kPi * x / 2) * std::cos(kPi * y / 2);
      s.u.x2[c] = 0.1 * std::cos(kPi * x) * std::cos(kPi * y / 2);
      s.theta[c] = 2.0 - 0.5 * y + 0.3 * std::cos(kPi * x / 2) * std::cos(kPi * y / 2);
    }
  }
  return s;
}

}  // namespace

TEST(Residual, UniformStateIsExactlyAtRest) {
  const Grid g = Grid::build(2, 1, 8, 4);
  const State s = uniform_state(g, 1.0, 1.0);
  const Residual r = residual(g, s, s, uniform_params(g, 1.0));
  EXPECT_TRUE(r.positive);
  for (double v : r.values) EXPECT_EQ(v, 0.0);
  const Residual ref = residual_reference(g, s, s, uniform_params(g, 1.0));
  for (double v : ref.values) EXPECT_EQ(v, 0.0);
}

TEST(Residual, SingleCellDensityBump) {
  // u = 0: only D_t rho and the h^alpha jump diffusion act on the mass row.
  const Grid g = Grid::build(2, 1, 4, 2);
  const SchemeParams p = uniform_params(g, 1.0);
  const State prev = uniform_state(g, 1.0, 1.0);
  State cand = prev;
  const double d = 0.25;
  const std::size_t K = g.index(1, 0);
  cand.rho[K] += d;
  const Residual r = residual_reference(g, prev, cand, p);
  const double ha = std::pow(g.h(), p.alpha);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    double expect = 0.0;
    if (c == K) expect = d / p.dt + 3.0 * ha * d / g.h();
    if (c == g.index(0, 0) || c == g.index(2, 0) || c == g.index(1, 1)) expect = -ha * d / g.h();
    EXPECT_NEAR(r.values[kVars * c + kRho], expect, 1e-13) << "cell " << c;
  }
  double mass_rows = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c) mass_rows += r.values[kVars * c + kRho];
  EXPECT_NEAR(mass_rows, d / p.dt, 1e-12);
}

TEST(Residual, StationaryStateLeavesOnlyWallRowDefects) {
  // Hand values on the affine stationary state: interior rows vanish. In the wall rows the
  // copied stress ghost sees half the hydrostatic gradient (momentum 2 row = -rho g / 2) and
  // the zero wall flux leaves one face of rho theta jump diffusion in the energy row.
  ExperimentConfig cfg = preset(1, "stable");
  cfg.n1 = 32;
  cfg.n2 = 16;
  const Grid g = make_grid(cfg);
  const SchemeParams p = make_params(cfg, g, 0.5 * g.h());
  const State s = stationary_state(cfg, g);
  const Residual r = residual(g, s, s, p);
  const double S = cfg.S_theta();
  const double ha = std::pow(g.h(), p.alpha);
  const double mom = -0.5 * 1.2 * cfg.g;
  const double energy = p.law.cv() * ha * 1.2 * S;
  for (int j = 0; j < g.n2(); ++j) {
    for (int i = 0; i < g.n1(); ++i) {
      const double* rc = &r.values[kVars * g.index(i, j)];
      EXPECT_NEAR(rc[kRho], 0.0, 1e-12);
      EXPECT_NEAR(rc[kU1], 0.0, 1e-12);
      const double m2 = (j == 0 || j == g.n2() - 1) ? mom : 0.0;
      const double e = j == 0 ? -energy : (j == g.n2() - 1 ? energy : 0.0);
      EXPECT_NEAR(rc[kU2], m2, 1e-11) << i << "," << j;
      EXPECT_NEAR(rc[kTheta], e, 1e-11) << i << "," << j;
    }
  }
  EXPECT_NEAR(mom, 0.18, 1e-15);
}

TEST(Step, UniformStateIsAFixedPoint) {
  const Grid g = Grid::build(2, 1, 8, 4);
  const State s = uniform_state(g, 1.0, 2.0);
  const SchemeParams p = uniform_params(g, 2.0);
  const State out = step(g, s, p, SolverOptions{});
  for (std::size_t c = 0; c < g.cells(); ++c) {
    EXPECT_NEAR(out.rho[c], 1.0, 1e-12);
    EXPECT_NEAR(out.theta[c], 2.0, 1e-12);
    EXPECT_NEAR(out.u.x1[c], 0.0, 1e-12);
  }
  EXPECT_DOUBLE_EQ(out.t, p.dt);
}

TEST(Step, ConservesMassAndMeetsTheTolerance) {
  ExperimentConfig cfg = preset(2);
  cfg.n1 = 16;
  cfg.n2 = 8;
  const Grid g = make_grid(cfg);
  const SchemeParams p = make_params(cfg, g, 0.5 * g.h());
  SolverOptions o;
  Stepper st(g, p, o);
  State s = build_initial_state(cfg, g);
  const double m0 = total(s.rho);
  for (int k = 0; k < 5; ++k) {
    const State next = st.advance(s);
    EXPECT_NEAR(total(next.rho) / m0, 1.0, 1e-12);
    EXPECT_LE(residual(g, s, next, p).max_abs(), o.newton_tol);
    EXPECT_TRUE(residual(g, s, next, p).positive);
    s = next;
  }
  EXPECT_NEAR(s.t, 5 * p.dt, 1e-14);
}

TEST(Step, DirectAndKrylovAgree) {
  ExperimentConfig cfg = preset(2);
  cfg.n1 = 16;
  cfg.n2 = 8;
  const Grid g = make_grid(cfg);
  const SchemeParams p = make_params(cfg, g, 0.5 * g.h());
  SolverOptions direct, krylov;
  direct.linear = LinearSolverKind::Direct;
  krylov.linear = LinearSolverKind::Krylov;
  const State s = build_initial_state(cfg, g);
  const State a = step(g, s, p, direct), b = step(g, s, p, krylov);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    EXPECT_NEAR(a.rho[c], b.rho[c], 1e-8);
    EXPECT_NEAR(a.theta[c], b.theta[c], 1e-7);
  }
}

TEST(Step, PreservesMirrorSymmetry) {
  const Grid g = Grid::build(2, 1, 16, 8);
  SchemeParams p;
  p.dt = 0.5 * g.h();
  p.g = -1.0;
  p.closure = {std::vector<double>(g.n1(), 2.5), std::vector<double>(g.n1(), 1.5)};
  SolverOptions o;
  o.newton_tol = 1e-11;
  State s = mirror_state(g);
  for (int k = 0; k < 3; ++k) s = step(g, s, p, o);
  double worst = 0.0;
  for (int j = 0; j < g.n2(); ++j) {
    for (int i = 0; i < g.n1(); ++i) {
      const std::size_t c = g.index(i, j), m = g.index(g.n1() - 1 - i, j);
      worst = std::max({worst, std::abs(s.rho[c] - s.rho[m]), std::abs(s.theta[c] - s.theta[m]),
                        std::abs(s.u.x1[c] + s.u.x1[m]), std::abs(s.u.x2[c] - s.u.x2[m])});
    }
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Step, RejectsBadParameters) {
  const Grid g = Grid::build(2, 1, 8, 4);
  SchemeParams p = uniform_params(g, 1.0);
  p.alpha = 1.0;
  EXPECT_THROW(Stepper(g, p, SolverOptions{}), ConfigError);
  p = uniform_params(g, 1.0);
  p.kappa = 0.0;
  EXPECT_THROW(Stepper(g, p, SolverOptions{}), ConfigError);
  SolverOptions o;
  o.max_newton = 0;
  EXPECT_THROW(Stepper(g, uniform_params(g, 1.0), o), ConfigError);
}

TEST(Step, WarnsOutsideTheTimeStepBand) {
  const Grid g = Grid::build(2, 1, 8, 4);
  SchemeParams p = uniform_params(g, 1.0);
  EXPECT_TRUE(p.validate(g).empty());
  p.dt = 3.0 * g.h();
  EXPECT_FALSE(p.validate(g).empty());
}

TEST(Run, EmptyTailAndRepeatedFixedPoint) {
  const Grid g = Grid::build(2, 1, 8, 4);
  const State s = uniform_state(g, 1.0, 1.0);
  const SchemeParams p = uniform_params(g, 1.0);
  EXPECT_EQ(step_count(0.0, 0.0, p.dt), 0);
  int calls = 0;
  const State same = run(g, s, p, SolverOptions{}, 0.0, [&](const StepEvent&) { ++calls; });
  EXPECT_EQ(calls, 0);
  EXPECT_EQ(same, s);
  const Trajectory tr = run_recorded(g, s, p, SolverOptions{}, 2 * p.dt);
  ASSERT_EQ(tr.size(), 3u);
  for (std::size_t k = 1; k < 3; ++k)
    for (std::size_t c = 0; c < g.cells(); ++c) EXPECT_NEAR(tr.at(k).rho[c], 1.0, 1e-12);
}

TEST(Run, StepCountRoundsToTheTimeGrid) {
  EXPECT_EQ(step_count(0.0, 1.0, 0.1), 10);
  EXPECT_EQ(step_count(0.5, 1.0, 0.125), 4);
}

TEST(Trajectory, Interpolants) {
  const Grid g = Grid::build(2, 1, 4, 2);
  Trajectory tr(uniform_state(g, 1.0, 1.0), 0.5);
  State s1 = uniform_state(g, 2.0, 3.0);
  s1.t = 0.5;
  tr.push(s1);
  State s2 = uniform_state(g, 4.0, 1.0);
  s2.t = 1.0;
  tr.push(s2);

  EXPECT_EQ(tr.interpolate_pc(0.5).rho[0], 2.0);
  EXPECT_EQ(tr.interpolate_pl(0.5).rho[0], 2.0);
  EXPECT_EQ(tr.interpolate_pc(0.75).rho[0], 4.0);
  EXPECT_DOUBLE_EQ(tr.interpolate_pl(0.75).rho[0], 3.0);
  EXPECT_DOUBLE_EQ(tr.interpolate_pl(0.75).theta[0], 2.0);
  EXPECT_DOUBLE_EQ(tr.interpolate_pl(0.25).rho[0], 1.5);
  EXPECT_DOUBLE_EQ(tr.discrete_time_derivative(0.75).rho[0], 4.0);
  EXPECT_DOUBLE_EQ(tr.discrete_time_derivative(0.5).theta[0], 4.0);
  EXPECT_EQ(tr.interpolate_pc(0.0).rho[0], 1.0);
  EXPECT_THROW(tr.interpolate_pc(1.5), RangeError);
  EXPECT_THROW(tr.interpolate_pl(-0.1), RangeError);
  EXPECT_THROW(tr.discrete_time_derivative(0.0), RangeError);
  EXPECT_DOUBLE_EQ(tr.t_end(), 1.0);
}
