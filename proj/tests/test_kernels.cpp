#include <gtest/gtest.h>
#include <omp.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "nsfv/kernels.hpp"
#include "nsfv/scheme.hpp"

using namespace nsfv;

namespace {

struct Case {
  Grid g;
  SchemeParams p;
  State prev;
  State cand;
};

State random_state(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> r(0.5, 2.0), u(-1.0, 1.0), t(1.0, 3.0);
  State s = State::zeros(g);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    s.rho[c] = r(rng);
    s.u.x1[c] = u(rng);
    s.u.x2[c] = u(rng);
    s.theta[c] = t(rng);
  }
  return s;
}

Case make_case(int n1, std::uint64_t seed) {
  Case s;
  s.g = Grid::build(2, 1, n1, n1 / 2);
  s.p.dt = 0.5 * s.g.h();
  s.p.g = -3.0;
  s.p.alpha = 0.6;
  std::mt19937_64 rng(seed + 100);
  std::uniform_real_distribution<double> t(1.0, 3.0);
  for (int i = 0; i < n1; ++i) {
    s.p.closure.theta_bottom.push_back(t(rng));
    s.p.closure.theta_top.push_back(t(rng));
  }
  s.prev = random_state(s.g, seed);
  s.cand = random_state(s.g, seed + 1);
  return s;
}

std::vector<double> packed(const State& s) {
  std::vector<double> x(kVars * s.cells());
  pack(s, x);
  return x;
}

}  // namespace

TEST(Kernels, ResidualMatchesReference) {
  for (int n1 : {4, 8, 16}) {
    Case s = make_case(n1, static_cast<std::uint64_t>(n1));
    const Residual ref = residual_reference(s.g, s.prev, s.cand, s.p);
    StepKernels k(s.g);
    std::vector<double> r(kVars * s.g.cells());
    EXPECT_TRUE(k.residual(s.p, packed(s.prev), packed(s.cand), r));
    const double scale = ref.max_abs();
    for (std::size_t q = 0; q < r.size(); ++q) EXPECT_NEAR(r[q], ref.values[q], 1e-12 * scale) << "row " << q;
    const Residual viaScheme = residual(s.g, s.prev, s.cand, s.p);
    EXPECT_EQ(viaScheme.values, r);
  }
}

TEST(Kernels, ResidualFlagsNonPositiveCandidates) {
  Case s = make_case(8, 3);
  s.cand.theta[5] = -0.1;
  StepKernels k(s.g);
  std::vector<double> r(kVars * s.g.cells());
  EXPECT_FALSE(k.residual(s.p, packed(s.prev), packed(s.cand), r));
  EXPECT_FALSE(residual_reference(s.g, s.prev, s.cand, s.p).positive);
}

TEST(Kernels, JacobianMatchesCentralDifferences) {
  Case s = make_case(8, 21);
  StepKernels k(s.g);
  BlockMatrix j = k.make_pattern();
  const auto x0 = packed(s.prev);
  auto x = packed(s.cand);
  k.jacobian(s.p, x, j);
  const Eigen::MatrixXd a(j.to_eigen());
  const std::size_t n = x.size();
  std::vector<double> rp(n), rm(n);
  double worst = 0.0;
  for (std::size_t col = 0; col < n; ++col) {
    const double e = 1e-6 * std::max(1.0, std::abs(x[col]));
    const double keep = x[col];
    x[col] = keep + e;
    k.residual(s.p, x0, x, rp);
    x[col] = keep - e;
    k.residual(s.p, x0, x, rm);
    x[col] = keep;
    double colmax = 0.0;
    for (std::size_t row = 0; row < n; ++row) colmax = std::max(colmax, std::abs(a(row, col)));
    for (std::size_t row = 0; row < n; ++row) {
      const double fd = (rp[row] - rm[row]) / (2 * e);
      worst = std::max(worst, std::abs(fd - a(row, col)) / std::max(1.0, colmax));
    }
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Kernels, PatternCoversTheThirteenPointStencil) {
  const Grid g = Grid::build(2, 1, 16, 8);
  StepKernels k(g);
  const BlockMatrix p = k.make_pattern();
  const std::size_t interior = g.index(5, 4);
  EXPECT_EQ(p.row_end(interior) - p.row_begin(interior), 13u);
  EXPECT_NE(p.find(interior, g.index(7, 4)), BlockMatrix::npos);
  EXPECT_NE(p.find(interior, g.index(6, 5)), BlockMatrix::npos);
  EXPECT_EQ(p.find(interior, g.index(8, 4)), BlockMatrix::npos);
  const std::size_t wall = g.index(0, 0);
  EXPECT_EQ(p.row_end(wall) - p.row_begin(wall), 9u);
}

TEST(Kernels, ResultsDoNotDependOnTheThreadCount) {
  Case s = make_case(32, 5);
  StepKernels k(s.g);
  const auto x0 = packed(s.prev), x = packed(s.cand);
  const int saved = omp_get_max_threads();
  std::vector<double> r1(x.size()), r4(x.size());
  BlockMatrix j1 = k.make_pattern(), j4 = k.make_pattern();
  omp_set_num_threads(1);
  k.residual(s.p, x0, x, r1);
  k.jacobian(s.p, x, j1);
  omp_set_num_threads(4);
  k.residual(s.p, x0, x, r4);
  k.jacobian(s.p, x, j4);
  omp_set_num_threads(saved);
  EXPECT_EQ(r1, r4);
  std::vector<double> y1(x.size()), y4(x.size());
  j1.multiply(x, y1);
  j4.multiply(x, y4);
  EXPECT_EQ(y1, y4);
  for (std::size_t slot = 0; slot < j1.nnz_blocks(); ++slot)
    for (int q = 0; q < BlockMatrix::kBB; ++q) ASSERT_EQ(j1.block(slot)[q], j4.block(slot)[q]);
}

TEST(Kernels, StepIsBitwiseReproducibleAcrossThreadCounts) {
  Case s = make_case(16, 9);
  // a gentle start: prev equals a smooth state
  State prev = State::zeros(s.g);
  for (std::size_t c = 0; c < s.g.cells(); ++c) {
    prev.rho[c] = 1.2 + 0.1 * std::sin(s.g.x1(s.g.col(c)));
    prev.theta[c] = 2.0;
  }
  for (int i = 0; i < s.g.n1(); ++i) s.p.closure.theta_bottom[i] = s.p.closure.theta_top[i] = 2.0;
  SolverOptions o;
  o.linear = LinearSolverKind::Krylov;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const State a = step(s.g, prev, s.p, o);
  omp_set_num_threads(3);
  const State b = step(s.g, prev, s.p, o);
  omp_set_num_threads(saved);
  EXPECT_EQ(a, b);
}
