// Serial operator-composition residual against the fused OpenMP kernels, plus the sparse
// pieces of a Newton step. Thread count is the second argument where it applies.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "nsfv/experiments.hpp"
#include "nsfv/kernels.hpp"
#include "nsfv/scheme.hpp"
#include "nsfv/sparse.hpp"

using namespace nsfv;

namespace {

struct Problem {
  ExperimentConfig cfg;
  Grid g;
  SchemeParams p;
  State prev, cand;
  std::vector<double> x0, x;

  explicit Problem(int n1) {
    cfg = preset(2);
    cfg.n1 = n1;
    cfg.n2 = n1 / 2;
    g = make_grid(cfg);
    p = make_params(cfg, g, 0.5 * g.h());
    prev = build_initial_state(cfg, g);
    cand = prev;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-0.01, 0.01);
    for (std::size_t c = 0; c < g.cells(); ++c) {
      cand.rho[c] *= 1 + d(rng);
      cand.u.x1[c] += d(rng);
      cand.u.x2[c] += d(rng);
    }
    x0.resize(kVars * g.cells());
    x.resize(kVars * g.cells());
    pack(prev, x0);
    pack(cand, x);
  }
};

void threads(const benchmark::State& st, int arg) { omp_set_num_threads(static_cast<int>(st.range(arg))); }

void BM_ResidualReference(benchmark::State& st) {
  const Problem pr(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(residual_reference(pr.g, pr.prev, pr.cand, pr.p));
  st.SetItemsProcessed(st.iterations() * static_cast<long long>(pr.g.cells()));
}

void BM_ResidualKernel(benchmark::State& st) {
  const Problem pr(static_cast<int>(st.range(0)));
  threads(st, 1);
  StepKernels k(pr.g);
  std::vector<double> r(pr.x.size());
  for (auto _ : st) {
    k.residual(pr.p, pr.x0, pr.x, r);
    benchmark::DoNotOptimize(r.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long long>(pr.g.cells()));
}

void BM_Jacobian(benchmark::State& st) {
  const Problem pr(static_cast<int>(st.range(0)));
  threads(st, 1);
  StepKernels k(pr.g);
  BlockMatrix j = k.make_pattern();
  for (auto _ : st) {
    k.jacobian(pr.p, pr.x, j);
    benchmark::DoNotOptimize(j.block(0));
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long long>(pr.g.cells()));
}

void BM_SpMV(benchmark::State& st) {
  const Problem pr(static_cast<int>(st.range(0)));
  threads(st, 1);
  StepKernels k(pr.g);
  BlockMatrix j = k.make_pattern();
  k.jacobian(pr.p, pr.x, j);
  std::vector<double> y(pr.x.size());
  for (auto _ : st) {
    j.multiply(pr.x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_Ilu(benchmark::State& st) {
  const Problem pr(static_cast<int>(st.range(0)));
  StepKernels k(pr.g);
  BlockMatrix j = k.make_pattern();
  k.jacobian(pr.p, pr.x, j);
  BlockIlu0 ilu;
  std::vector<double> z(pr.x.size());
  for (auto _ : st) {
    ilu.factor(j);
    ilu.solve(pr.x, z);
    benchmark::DoNotOptimize(z.data());
  }
}

const int kMaxThreads = std::max(2, omp_get_num_procs());

}  // namespace

BENCHMARK(BM_ResidualReference)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ResidualKernel)->ArgsProduct({{64, 128}, {1, kMaxThreads}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Jacobian)->ArgsProduct({{64, 128}, {1, kMaxThreads}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SpMV)->ArgsProduct({{64, 128}, {1, kMaxThreads}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Ilu)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
