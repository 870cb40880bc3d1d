// Acceptance suite: one PASS/FAIL line per criterion. Criteria 4-8 read the desk archive
// produced by `nsfv run --config desk_exp2.json`; 10 and 11 drive other executables.

#include <sys/wait.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nsfv/convergence.hpp"
#include "nsfv/diagnostics.hpp"
#include "nsfv/driver.hpp"
#include "nsfv/experiments.hpp"
#include "nsfv/io.hpp"
#include "nsfv/monitors.hpp"
#include "nsfv/scheme.hpp"
#include "nsfv/thermo.hpp"

namespace fs = std::filesystem;
using namespace nsfv;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  fs::path desk;
  fs::path work;
  std::string cli;
  std::string operators_test;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

int run_command(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

double max_state_diff(const State& a, const State& b) {
  double d = 0.0;
  for (std::size_t c = 0; c < a.cells(); ++c) {
    d = std::max({d, std::abs(a.rho[c] - b.rho[c]), std::abs(a.u.x1[c] - b.u.x1[c]),
                  std::abs(a.u.x2[c] - b.u.x2[c]), std::abs(a.theta[c] - b.theta[c])});
  }
  return d;
}

// Sample m of the desk archive sits at t = m * cadence.
struct Desk {
  RunConfig cfg;
  Grid g;
  long long last = -1;
};

Desk open_desk(const fs::path& dir) {
  if (!fs::exists(dir / "config.json")) throw IoError(dir.string() + ": no archive (run the desk fixture first)");
  Desk d;
  d.cfg = load_config(dir / "config.json");
  d.g = make_grid(d.cfg.experiment);
  d.last = last_contiguous_sample(dir);
  const long long expected = static_cast<long long>(std::llround(d.cfg.plan.t_end / d.cfg.plan.sample_cadence));
  if (d.last < expected) {
    throw IoError(dir.string() + ": archive incomplete, samples 0.." + std::to_string(d.last) + " of " +
                  std::to_string(expected));
  }
  return d;
}

// L1 norm of the Reynolds stress trace (the stress is positive semidefinite, so this is its
// nuclear norm) after every sample of a stream of states.
class DefectTracker {
 public:
  DefectTracker(const Grid& g, const SchemeParams& p, double cadence, long long M0)
      : g_(g), law_(p.law), Theta_(sample_extension(g, p.closure, affine_extension(g, p.closure))),
        acc_(g.cells(), cadence, M0), cadence_(cadence) {}

  void add(const State& s, long long m) {
    acc_.update(sample_fields(s, Theta_, law_), static_cast<double>(m) * cadence_);
    values_.push_back(l1_norm(g_, reynolds_defect(acc_.mean(), law_).trace));
  }
  const std::vector<double>& values() const { return values_; }

 private:
  const Grid& g_;
  GasLaw law_;
  CellField Theta_;
  RunningStats acc_;
  double cadence_;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------------------------

Outcome rayleigh_calibration(const Context&) {
  const std::vector<std::pair<std::string, double>> captions = {
      {"-100", 9.5e5}, {"-10", 8.7e4}, {"-2", 1.2e4}, {"-1.1", 5.5e3}, {"-1", 4.8e3}};
  Outcome o{true, ""};
  auto check = [&](const std::string& name, double ra, double ref) {
    const double rel = std::abs(ra - ref) / ref;
    const bool ok = rel <= 0.05;
    o.pass = o.pass && ok;
    o.detail += name + " " + fmt(ra, 4) + (ok ? "" : "(!)") + " vs " + fmt(ref, 2) + "; ";
  };
  for (const auto& [v, ref] : captions) check("S=" + v, rayleigh(preset(1, v)), ref);
  check("exp2", rayleigh(preset(2)), 8e4);
  o.detail += "tolerance 5%";
  return o;
}

Outcome stationary_fixed_point(const Context&) {
  ExperimentConfig cfg = preset(1, "stable");
  cfg.n1 = 32;
  cfg.n2 = 16;
  const Grid g = make_grid(cfg);
  const SchemeParams p = make_params(cfg, g, 0.5 * g.h());
  const State s0 = stationary_state(cfg, g);
  const State s1 = step(g, s0, p, SolverOptions{});
  double wall = 0.0, inner = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const int j = g.row(c);
    const double d = std::max({std::abs(s1.rho[c] - s0.rho[c]), std::abs(s1.u.x1[c] - s0.u.x1[c]),
                               std::abs(s1.u.x2[c] - s0.u.x2[c]), std::abs(s1.theta[c] - s0.theta[c])});
    double& slot = (j == 0 || j == g.n2() - 1) ? wall : inner;
    slot = std::max(slot, d);
  }
  const double d = max_state_diff(s0, s1);
  return {d <= 1e-8, "||U1 - U0||_inf = " + fmt(d, 3) + " (wall rows " + fmt(wall, 3) + ", interior " +
                         fmt(inner, 3) + "), limit 1e-8"};
}

Outcome stable_attraction(const Context&) {
  ExperimentConfig cfg = preset(1, "stable");
  cfg.n1 = 64;
  cfg.n2 = 32;
  cfg.c = 0.01;
  const Grid g = make_grid(cfg);
  const double dt = 0.5 * g.h();
  const SchemeParams p = make_params(cfg, g, dt);
  const CellField exact = stationary_state(cfg, g).theta;
  const long long per_sample = std::llround(1.0 / dt);
  std::vector<CellField> theta;
  run(g, build_initial_state(cfg, g), p, SolverOptions{}, 200.0, [&](const StepEvent& e) {
    if (e.index % per_sample == 0) theta.push_back(e.cur.theta);
  });
  const auto e1 = error_exact_e1(g, theta, exact);
  const auto e2 = error_exact_e2(g, theta, exact);
  // sample k sits at T = k + 1
  const double at20 = e1[19], at200 = e1[199];
  std::size_t rises = 0;
  double worst = 0.0;
  for (std::size_t k = 99; k + 1 < e2.size(); ++k) {
    if (e2[k + 1] > e2[k] * (1 + 1e-12)) {
      ++rises;
      worst = std::max(worst, e2[k + 1] / e2[k] - 1);
    }
  }
  const bool ok = at200 <= at20 / 10 && rises == 0;
  return {ok, "E~1(theta): T=20 " + fmt(at20, 4) + ", T=200 " + fmt(at200, 4) + " (ratio " + fmt(at20 / at200, 3) +
                  ", need >= 10); E~2 over [100,200]: " + std::to_string(rises) + " increases, worst " +
                  fmt(worst, 3) + ", E~2(200) = " + fmt(e2.back(), 4)};
}

Outcome conservation(const Context& ctx) {
  const Desk d = open_desk(ctx.desk);
  const RunSummary s = summarize_series(ctx.desk);
  const double tol = d.cfg.solver.newton_tol;
  const bool ok = s.steps >= 500 && s.max_mass_drift <= 1e-9 && s.max_budget <= 10 * tol && s.min_sigma >= 0 &&
                  s.max_decay_ratio <= 1e-10;
  return {ok, std::to_string(s.steps) + " steps; mass drift " + fmt(s.max_mass_drift, 3) + " (<= 1e-9); budget " +
                  fmt(s.max_budget, 3) + " (<= " + fmt(10 * tol, 2) + "); min sigma " + fmt(s.min_sigma, 3) +
                  " (>= 0); max D/scale " + fmt(s.max_decay_ratio, 3) + " (<= 1e-10)"};
}

Outcome boundedness(const Context& ctx) {
  const Desk d = open_desk(ctx.desk);
  const RunSummary s = summarize_series(ctx.desk);
  const bool positive = s.range.rho_min > 0 && s.range.theta_min > 0;
  const long long M0 = d.last - d.last / 4;
  Outcome o{positive, "min rho " + fmt(s.range.rho_min) + ", min theta " + fmt(s.range.theta_min) + "; last quarter"};
  for (Quantity q : {Quantity::M1, Quantity::M2, Quantity::E}) {
    const auto series = load_quantity_series(ctx.desk, q, M0, d.last);
    std::vector<double> n;
    for (const CellField& f : series) n.push_back(l1_norm(d.g, f));
    const auto [lo, hi] = std::minmax_element(n.begin(), n.end());
    double mean = 0.0;
    for (double v : n) mean += v / static_cast<double>(n.size());
    const double width = (*hi - *lo) / mean;
    o.pass = o.pass && mean > 0 && width <= 0.5;
    o.detail += std::string(" ") + quantity_name(q) + " band " + fmt(width, 3) + " of mean " + fmt(mean, 4) + ";";
  }
  o.detail += " limit 0.5";
  return o;
}

Outcome ergodic_averages(const Context& ctx) {
  const Desk d = open_desk(ctx.desk);
  const long long M0 = std::llround(100.0 / d.cfg.plan.sample_cadence);
  Outcome o{true, "M0 = " + std::to_string(M0) + ";"};
  for (Quantity q : {Quantity::Theta, Quantity::E}) {
    const auto e2 = error_e2(d.g, load_quantity_series(ctx.desk, q, M0, d.last));
    const std::size_t n = e2.size();
    bool tail_ok = true;
    for (std::size_t k = n - 5; k + 1 < n; ++k) tail_ok = tail_ok && e2[k + 1] <= 1.1 * e2[k];
    const double first = e2[n / 4 - 1], final = e2[3 * n / 4 - 1];
    const bool ok = tail_ok && final <= 0.5 * first;
    o.pass = o.pass && ok;
    o.detail += std::string(" ") + quantity_name(q) + ": last five " + fmt(e2[n - 5], 3) + ".." + fmt(e2[n - 2], 3) +
                (tail_ok ? " nonincreasing" : " rising") + ", quarter ratio " + fmt(final / first, 3) + ";";
  }
  o.detail += " limits 10% per step, 0.5";
  return o;
}

Outcome defect_settling(const Context& ctx) {
  const Desk d = open_desk(ctx.desk);
  const SchemeParams p = make_params(d.cfg.experiment, d.g, d.cfg.dt(d.g));
  const double cadence = d.cfg.plan.sample_cadence;
  const long long M0 = std::llround(100.0 / cadence);
  DefectTracker desk(d.g, p, cadence, M0);
  for (long long m = M0 + 1; m <= d.last; ++m) desk.add(read_snapshot(snapshot_path(ctx.desk, m)).state, m);
  const auto& r = desk.values();
  double worst = 0.0;
  for (std::size_t k = r.size() - r.size() / 4; k < r.size(); ++k) worst = std::max(worst, std::abs(r[k] - r[k - 1]) / r[k - 1]);

  // Reference: the stationary state of the stable preset on the desk grid, same cadence, 10 samples.
  ExperimentConfig ref = preset(1, "stable");
  ref.n1 = d.g.n1();
  ref.n2 = d.g.n2();
  const Grid g = make_grid(ref);
  const SchemeParams rp = make_params(ref, g, d.cfg.dt(g));
  const long long per_sample = d.cfg.steps_per_sample(g);
  DefectTracker still(g, rp, cadence, 0);
  run(g, stationary_state(ref, g), rp, d.cfg.solver, 10 * cadence, [&](const StepEvent& e) {
    if (e.index % per_sample == 0) still.add(e.cur, e.index / per_sample);
  });
  const double stationary = still.values().back();
  const bool ok = worst <= 0.5 && r.back() >= 10 * stationary;
  return {ok, "||R||_1 final " + fmt(r.back(), 4) + ", worst consecutive change over the last quarter " + fmt(worst, 3) +
                  " (<= 0.5); stationary run " + fmt(stationary, 3) + " (ratio " + fmt(r.back() / stationary, 3) +
                  ", need >= 10)"};
}

Outcome measures(const Context& ctx) {
  const Desk d = open_desk(ctx.desk);
  AnalyzeOptions a;
  a.stats = "measures";
  a.M0 = std::llround(100.0 / d.cfg.plan.sample_cadence);
  analyze_archive(ctx.desk, a);
  std::vector<std::string> want = {"hist_F1_m1.csv", "hist_F2_u1.csv", "moments.csv"};
  for (const Probe& pr : kProbes) want.push_back(std::string("hist_F3_m1_") + pr.name + ".csv");
  int missing = 0;
  for (const auto& f : want) missing += fs::file_size(ctx.desk / "stats" / f) > 0 ? 0 : 1;

  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> normal(3.0, 2.0);
  std::vector<double> v(200000);
  for (double& x : v) x = normal(rng);
  const HistogramMeasure h = HistogramMeasure::from_samples(v, 50);
  const MomentReport r = moment_report(v);
  const double skew = r.skewness.value_or(NAN), kurt = r.excess_kurtosis.value_or(NAN);
  const bool ok = missing == 0 && h.total == static_cast<long long>(v.size()) && std::abs(skew) < 0.1 &&
                  std::abs(kurt) < 0.2;

  // desk-scale moments are reported only
  std::string desk_line;
  const auto m1 = load_quantity_series(ctx.desk, Quantity::M1, *a.M0, d.last);
  std::vector<double> f1;
  for (const CellField& f : m1) f1.push_back(functional_f1(d.g, f));
  const MomentReport dr = moment_report(f1);
  desk_line = "; desk F1(m1): skewness " + fmt(dr.skewness.value_or(NAN), 3) + ", excess kurtosis " +
              fmt(dr.excess_kurtosis.value_or(NAN), 3);
  return {ok, std::to_string(want.size() - static_cast<std::size_t>(missing)) + "/" + std::to_string(want.size()) +
                  " outputs; synthetic Gaussian skewness " + fmt(skew, 3) + " (< 0.1), excess kurtosis " +
                  fmt(kurt, 3) + " (< 0.2)" + desk_line};
}

Outcome mesh_cascade(const Context&) {
  CascadeOptions o;
  o.coarse_n1 = 32;
  o.levels = 3;
  o.T = 5.0;
  const CascadeResult smooth = run_cascade(preset(2), o);
  o.start = CascadeStart::Stationary;
  const CascadeResult still = run_cascade(preset(1, "stable"), o);
  bool decreasing = smooth.complete && smooth.differences.size() == 2;
  std::string ds;
  for (std::size_t k = 0; k < smooth.differences.size(); ++k) {
    ds += (k ? ", " : "") + fmt(smooth.differences[k].d, 4);
    if (k > 0) decreasing = decreasing && smooth.differences[k].d < smooth.differences[k - 1].d;
  }
  const double order = still.complete && still.differences.size() == 2 ? still.differences.back().order : NAN;
  const bool ok = decreasing && std::abs(order - 2.0) <= 0.5;
  return {ok, "exp2 d_n = " + ds + (decreasing ? " (decreasing)" : " (not decreasing)") +
                  (smooth.complete ? "" : " [" + smooth.failure + "]") + "; stationary d_n = " +
                  (still.differences.empty() ? "-" : fmt(still.differences[0].d, 3) + ", " + fmt(still.differences.back().d, 3)) +
                  ", order " + fmt(order, 3) + " (2 +- 0.5)"};
}

Outcome operator_suite(const Context& ctx) {
  if (ctx.operators_test.empty()) return {false, "no --operators-test executable given"};
  const int code = run_command(ctx.operators_test);
  return {code == 0, ctx.operators_test + " exit status " + std::to_string(code)};
}

Outcome determinism(const Context& ctx) {
  if (ctx.cli.empty()) return {false, "no --cli executable given"};
  const fs::path dir = ctx.work / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "config.json";
  std::ofstream(cfg) << R"({"experiment": 2, "n1": 32, "seed": 7,
  "run": {"t_end": 4, "sample_cadence": 0.5, "checkpoint_cadence": 1}})";
  const std::string base = ctx.cli + " run --config " + cfg.string() + " --out ";
  if (run_command(base + (dir / "a").string()) != 0 || run_command(base + (dir / "b").string()) != 0 ||
      run_command(base + (dir / "c").string() + " --t-end 2") != 0 ||
      run_command(ctx.cli + " resume --archive " + (dir / "c").string() + " --t-end 4") != 0) {
    return {false, "a CLI run failed"};
  }
  auto same = [&](const fs::path& x, const fs::path& y, int& files) {
    bool eq = slurp(x / "series.csv") == slurp(y / "series.csv");
    files = 1;
    for (const auto& e : fs::directory_iterator(x / "snapshots")) {
      if (!e.is_regular_file()) continue;
      ++files;
      eq = eq && slurp(e.path()) == slurp(y / "snapshots" / e.path().filename());
    }
    return eq;
  };
  int nab = 0, nac = 0;
  const bool ab = same(dir / "a", dir / "b", nab);
  const bool ac = same(dir / "a", dir / "c", nac);
  return {ab && ac, std::string("two runs ") + (ab ? "identical" : "DIFFER") + " (" + std::to_string(nab) +
                        " files); split run + resume " + (ac ? "identical" : "DIFFERS") + " (" + std::to_string(nac) +
                        " files)"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome(const Context&)> fn;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nsfv acceptance suite"};
  Context ctx;
  std::vector<int> only;
  std::string desk = "build/acceptance/desk_exp2", work = "build/acceptance/work";
  app.add_option("--only", only, "run these criteria only");
  app.add_option("--desk", desk, "desk-scale experiment 2 archive");
  app.add_option("--work", work, "scratch directory");
  app.add_option("--cli", ctx.cli, "nsfv executable");
  app.add_option("--operators-test", ctx.operators_test, "operator unit test executable");
  CLI11_PARSE(app, argc, argv);
  ctx.desk = desk;
  ctx.work = work;
  fs::create_directories(ctx.work);

  const std::vector<Criterion> all = {
      {1, "rayleigh calibration", rayleigh_calibration},
      {2, "stationary fixed point", stationary_fixed_point},
      {3, "stable-region attraction", stable_attraction},
      {4, "conservation and budgets", conservation},
      {5, "boundedness", boundedness},
      {6, "ergodic averages", ergodic_averages},
      {7, "reynolds defect settling", defect_settling},
      {8, "measures and moments", measures},
      {9, "mesh cascade", mesh_cascade},
      {10, "operator suite", operator_suite},
      {11, "determinism", determinism},
  };
  int failed = 0;
  for (const Criterion& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s  %-26s %s [%.1f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
