#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "nsfv/convergence.hpp"
#include "nsfv/errors.hpp"

using namespace nsfv;

TEST(Restriction, PreservesMassAndAffineFields) {
  const Grid fine = Grid::build(2, 1, 16, 8);
  const Grid coarse = Grid::build(2, 1, 8, 4);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  State s = State::zeros(fine);
  for (int j = 0; j < fine.n2(); ++j) {
    for (int i = 0; i < fine.n1(); ++i) {
      const std::size_t c = fine.index(i, j);
      s.rho[c] = u(rng);
      s.theta[c] = 1.0 + 0.5 * fine.x1(i) - 2.0 * fine.x2(j);
      s.u.x1[c] = 3.0;
    }
  }
  s.t = 0.75;
  const State r = restrict_state(fine, s);
  ASSERT_EQ(r.cells(), coarse.cells());
  EXPECT_EQ(r.t, 0.75);
  const double mf = std::accumulate(s.rho.begin(), s.rho.end(), 0.0) * fine.cell_area();
  const double mc = std::accumulate(r.rho.begin(), r.rho.end(), 0.0) * coarse.cell_area();
  EXPECT_NEAR(mc, mf, 1e-13 * mf);
  for (int j = 0; j < coarse.n2(); ++j) {
    for (int i = 0; i < coarse.n1(); ++i) {
      const std::size_t c = coarse.index(i, j);
      EXPECT_NEAR(r.theta[c], 1.0 + 0.5 * coarse.x1(i) - 2.0 * coarse.x2(j), 1e-13);
      EXPECT_EQ(r.u.x1[c], 3.0);
    }
  }
  EXPECT_THROW(restrict_state(Grid::build(2, 1, 18, 9), State::zeros(Grid::build(2, 1, 18, 9))), ConfigError);
}

TEST(Cascade, RejectsBadOptions) {
  CascadeOptions o;
  o.levels = 1;
  EXPECT_THROW(run_cascade(preset(2), o), ConfigError);
  o = CascadeOptions{};
  o.coarse_n1 = 7;
  EXPECT_THROW(run_cascade(preset(2), o), ConfigError);
  o = CascadeOptions{};
  o.q = 0.5;
  EXPECT_THROW(run_cascade(preset(2), o), ConfigError);
}

TEST(Cascade, RestingStateGivesZeroDifferences) {
  ExperimentConfig cfg = preset(1, "stable");
  cfg.theta_L = cfg.theta_H = 2.0;
  cfg.g = 0.0;
  cfg.bulk = BulkProfile::None;
  CascadeOptions o;
  o.coarse_n1 = 8;
  o.levels = 3;
  o.T = 0.5;
  o.start = CascadeStart::Stationary;
  const CascadeResult r = run_cascade(cfg, o);
  ASSERT_TRUE(r.complete);
  ASSERT_EQ(r.levels.size(), 3u);
  ASSERT_EQ(r.differences.size(), 2u);
  for (const auto& d : r.differences) EXPECT_NEAR(d.d, 0.0, 1e-12);
  EXPECT_EQ(r.levels[1].n1, 16);
  EXPECT_DOUBLE_EQ(r.levels[2].dt, 0.5 * r.levels[2].h);
  EXPECT_EQ(r.levels[0].steps, 2);
}

TEST(Cascade, ShortExperimentTwoCascade) {
  ExperimentConfig cfg = preset(2);
  CascadeOptions o;
  o.coarse_n1 = 8;
  o.levels = 3;
  o.T = 0.5;
  const CascadeResult r = run_cascade(cfg, o);
  ASSERT_TRUE(r.complete) << r.failure;
  ASSERT_EQ(r.differences.size(), 2u);
  EXPECT_TRUE(std::isnan(r.differences[0].order));
  for (const auto& d : r.differences) {
    EXPECT_GT(d.d, 0.0);
    EXPECT_TRUE(std::isfinite(d.d));
    const double parts = d.d_rho * d.d_rho + d.d_u1 * d.d_u1 + d.d_u2 * d.d_u2 + d.d_theta * d.d_theta;
    EXPECT_NEAR(d.d * d.d, parts, 1e-12 * parts);
  }
  EXPECT_NEAR(r.differences[1].order, std::log2(r.differences[0].d / r.differences[1].d), 1e-15);
}
